#include "wpx/packets.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "nlohmann/json.hpp"
#include "wpx/field.hpp"

namespace wpx {

namespace {
constexpr int kDefaultProfileRes = 8192;

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Tail of the Calderon integral: int_r^inf Psi(s)^2 ds/s (support ends at 2).
double calderon_tail(const RadialProfiles& p, double r) {
  double lo = std::log(std::max(r, 0.45)), hi = std::log(2.0);
  if (lo >= hi) return 0.0;
  const int M = 4096;
  double h = (hi - lo) / M, s = 0;
  for (int i = 0; i < M; ++i) {
    double v = p.Psi(std::exp(lo + (i + 0.5) * h));
    s += v * v;
  }
  return s * h;
}
}  // namespace

std::size_t PacketDictionary::lattice_size() const {
  std::size_t t = 1;
  for (int i = 0; i < n; ++i) t *= grid_size;
  return t;
}

Vec PacketDictionary::lattice_freq(std::size_t m) const {
  Vec z(n);
  for (int i = n - 1; i >= 0; --i) {
    z[i] = fft_freq(static_cast<int>(m % grid_size), grid_size);
    m /= grid_size;
  }
  return z;
}

double PacketDictionary::psi_eval(const Vec& xi, const Vec& zeta) const {
  double mag = xi.norm();
  if (mag <= 0) throw config_error("psi_eval: xi must be nonzero");
  double zr = zeta.norm();
  if (zr <= 0) return 0.0;  // psi_xi(0) := 0 by convention
  double radial = profiles.Psi(zr / mag);
  if (radial == 0.0) return 0.0;
  double chord = (zeta.hat() - xi.hat()).norm();
  double ang = profiles.phi(std::sqrt(mag) * chord);
  if (ang == 0.0) return 0.0;
  double c = c_norm(profiles, n, mag);
  return std::pow(mag, -0.5 * n) * c * radial * ang;
}

double PacketDictionary::q_radial(double r) const {
  if (r >= 2.0) return 0.0;
  return q_tab.eval(std::max(r, 0.0));
}

PacketDictionary build_dictionary(const RadialProfiles& profiles,
                                  int grid_size, int n, double C_ang,
                                  int radial_nodes, DictMode mode) {
  if (!is_pow2(grid_size)) throw config_error("grid_size must be a power of 2");
  if (grid_size < 32) throw config_error("grid_size < 32: band too small");
  if (C_ang < 1.0) throw config_error("C_ang must be >= 1");
  if (radial_nodes < 1) throw config_error("radial_nodes must be >= 1");
  if (n != 2 && n != 3) throw config_error("dimension must be 2 or 3");

  PacketDictionary d;
  d.n = n;
  d.grid_size = grid_size;
  d.guard = guard_band(grid_size);
  d.mode = mode;
  d.C_ang = C_ang;
  d.radial_nodes = radial_nodes;
  d.profiles = profiles;
  d.w_low = ball_measure(n) * (1.0 - std::pow(2.0, -n));

  // Low-band radial profile from the defining xi-average. Integrating the
  // packet formula over directions nu collapses (by the definition of
  // c_{|xi|}) to q(r)^2 = w_low^{-1} int_r^inf Psi(s)^2 ds/s.
  d.q_tab.build(2.0, 2048, [&](double r) {
    return std::sqrt(std::max(0.0, calderon_tail(profiles, r) / d.w_low));
  });

  const int L = radial_nodes;
  const double max_center = 2.0 * d.guard;
  d.log2_base = (0.5) / L;  // ring 0 is (j,l) = (0,0)

  // Rings: log-uniform radial nodes, quasi-uniform directions per annulus.
  for (int j = 0;; ++j) {
    double ann_lo = std::pow(2.0, j);
    if (ann_lo > max_center) break;
    int ndir = std::max(
        4, static_cast<int>(std::ceil(C_ang * std::pow(2.0, 0.5 * j * (n - 1)))));
    // Stagger rings and keep directions off the lattice axes (axis-aligned
    // directions make the discrete cone counts of the tent module biased).
    double offset = (j % 2) ? 0.5 : 0.25;
    for (int l = 0; l < L; ++l) {
      double mag = std::pow(2.0, j + (l + 0.5) / L);
      if (mag > max_center) continue;
      Ring ring;
      ring.j = j;
      ring.l = l;
      ring.mag = mag;
      ring.ndir = ndir;
      ring.offset = offset;
      ring.first_packet = static_cast<int>(d.indices.size());
      ring.cnorm = c_norm(profiles, n, mag);
      double dlog = std::log(2.0) / L;
      double w = std::pow(mag, n - 1) * (mag * dlog) * sphere_measure(n) / ndir;
      for (int k = 0; k < ndir; ++k) {
        PacketIndex pi;
        pi.j = j;
        pi.l = l;
        pi.k = k;
        pi.w = w;
        if (n == 2) {
          double a = TWO_PI * (k + offset) / ndir;
          pi.center = Vec(mag * std::cos(a), mag * std::sin(a));
        } else {
          // Fibonacci sphere, offset-rotated per annulus.
          double golden = PI * (3.0 - std::sqrt(5.0));
          double z = 1.0 - 2.0 * (k + 0.5) / ndir;
          double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
          double a = golden * k + TWO_PI * offset;
          pi.center = Vec(mag * rr * std::cos(a), mag * rr * std::sin(a),
                          mag * z);
        }
        d.indices.push_back(pi);
      }
      d.rings.push_back(ring);
    }
  }

  // Lattice samples per packet. Entries beyond the guard band are dropped:
  // the dictionary resolves |zeta| <= guard only.
  std::size_t total = d.lattice_size();
  d.psi.resize(d.indices.size());
  std::vector<double> zmag(total);
  std::vector<Vec> zvec(total);
  for (std::size_t m = 0; m < total; ++m) {
    zvec[m] = d.lattice_freq(m);
    zmag[m] = zvec[m].norm();
  }
  for (std::size_t r = 0; r < d.rings.size(); ++r) {
    const Ring& ring = d.rings[r];
    double mag = ring.mag, rt = std::sqrt(mag);
    double amp = std::pow(mag, -0.5 * n) * ring.cnorm;
    for (std::size_t m = 0; m < total; ++m) {
      double zr = zmag[m];
      if (zr <= 0.0 || zr > d.guard) continue;
      double radial = profiles.Psi(zr / mag);
      if (radial == 0.0) continue;
      Vec zh = zvec[m].hat();
      for (int k = 0; k < ring.ndir; ++k) {
        const PacketIndex& pi = d.indices[ring.first_packet + k];
        double chord = (zh - pi.center.hat()).norm();
        if (rt * chord >= 1.0) continue;
        double v = amp * radial * profiles.phi(rt * chord);
        if (v == 0.0) continue;
        auto& sl = d.psi[ring.first_packet + k];
        sl.idx.push_back(static_cast<std::uint32_t>(m));
        sl.val.push_back(v);
      }
    }
  }
  // Low band.
  for (std::size_t m = 0; m < total; ++m) {
    if (zmag[m] >= 2.0 || zmag[m] > d.guard) continue;
    double v = d.q_radial(zmag[m]);
    if (v == 0.0) continue;
    d.q_slice.idx.push_back(static_cast<std::uint32_t>(m));
    d.q_slice.val.push_back(v);
  }

  // Raw partition function and frame deviation over the resolved band.
  d.Q.assign(total, 0.0);
  for (std::size_t p = 0; p < d.psi.size(); ++p) {
    double w = d.indices[p].w;
    const auto& sl = d.psi[p];
    for (std::size_t i = 0; i < sl.idx.size(); ++i)
      d.Q[sl.idx[i]] += w * sl.val[i] * sl.val[i];
  }
  for (std::size_t i = 0; i < d.q_slice.idx.size(); ++i)
    d.Q[d.q_slice.idx[i]] += d.w_low * d.q_slice.val[i] * d.q_slice.val[i];
  double eps = 0;
  for (std::size_t m = 0; m < total; ++m)
    if (zmag[m] <= d.guard) eps = std::max(eps, std::abs(d.Q[m] - 1.0));
  d.eps_frame = eps;

  if (mode == DictMode::renormalized) {
    std::vector<double> scale(total, 0.0);
    for (std::size_t m = 0; m < total; ++m)
      if (d.Q[m] > 0) scale[m] = 1.0 / std::sqrt(d.Q[m]);
    for (auto& sl : d.psi)
      for (std::size_t i = 0; i < sl.idx.size(); ++i)
        sl.val[i] *= scale[sl.idx[i]];
    for (std::size_t i = 0; i < d.q_slice.idx.size(); ++i)
      d.q_slice.val[i] *= scale[d.q_slice.idx[i]];
    // Recompute Q; it is now exactly 1 on the covered lattice points.
    std::fill(d.Q.begin(), d.Q.end(), 0.0);
    for (std::size_t p = 0; p < d.psi.size(); ++p) {
      double w = d.indices[p].w;
      const auto& sl = d.psi[p];
      for (std::size_t i = 0; i < sl.idx.size(); ++i)
        d.Q[sl.idx[i]] += w * sl.val[i] * sl.val[i];
    }
    for (std::size_t i = 0; i < d.q_slice.idx.size(); ++i)
      d.Q[d.q_slice.idx[i]] += d.w_low * d.q_slice.val[i] * d.q_slice.val[i];
    eps = 0;
    for (std::size_t m = 0; m < total; ++m)
      if (zmag[m] <= d.guard) eps = std::max(eps, std::abs(d.Q[m] - 1.0));
    d.eps_frame = eps;
  }
  return d;
}

void save_dictionary(const PacketDictionary& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for write: " + path);
  const char magic[4] = {'P', 'W', 'P', 'K'};
  std::uint32_t version = 1;
  std::int32_t hdr[5] = {d.n, d.grid_size,
                         d.mode == DictMode::renormalized ? 1 : 0,
                         d.radial_nodes, static_cast<std::int32_t>(d.packets())};
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  out.write(reinterpret_cast<const char*>(&d.C_ang), sizeof(double));
  for (const auto& pi : d.indices) {
    std::int32_t jlk[3] = {pi.j, pi.l, pi.k};
    out.write(reinterpret_cast<const char*>(jlk), sizeof(jlk));
    out.write(reinterpret_cast<const char*>(pi.center.v.data()),
              3 * sizeof(double));
    out.write(reinterpret_cast<const char*>(&pi.w), sizeof(double));
  }
  if (!out) throw io_error("write failed: " + path);
  nlohmann::json side = {{"n", d.n},
                         {"grid_size", d.grid_size},
                         {"mode", d.mode == DictMode::renormalized
                                      ? "renormalized"
                                      : "raw"},
                         {"C_ang", d.C_ang},
                         {"radial_nodes", d.radial_nodes},
                         {"packets", d.packets()},
                         {"guard", d.guard},
                         {"eps_frame", d.eps_frame}};
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

PacketDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  char magic[4];
  std::uint32_t version;
  std::int32_t hdr[5];
  double C_ang;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  in.read(reinterpret_cast<char*>(&C_ang), sizeof(double));
  if (!in || std::memcmp(magic, "PWPK", 4) != 0 || version != 1)
    throw io_error("not a PWPK dictionary: " + path);
  PacketDictionary d = build_dictionary(
      build_profiles(kDefaultProfileRes), hdr[1], hdr[0], C_ang, hdr[3],
      hdr[2] ? DictMode::renormalized : DictMode::raw);
  if (static_cast<std::int32_t>(d.packets()) != hdr[4])
    throw io_error("dictionary record count mismatch: " + path);
  for (const auto& pi : d.indices) {
    std::int32_t jlk[3];
    double center[3], w;
    in.read(reinterpret_cast<char*>(jlk), sizeof(jlk));
    in.read(reinterpret_cast<char*>(center), sizeof(center));
    in.read(reinterpret_cast<char*>(&w), sizeof(double));
    if (!in) throw io_error("truncated dictionary: " + path);
    bool ok = jlk[0] == pi.j && jlk[1] == pi.l && jlk[2] == pi.k;
    for (int i = 0; i < d.n; ++i)
      ok = ok && std::abs(center[i] - pi.center[i]) <= 1e-12;
    ok = ok && std::abs(w - pi.w) <= 1e-12 * pi.w;
    if (!ok) throw io_error("dictionary record mismatch: " + path);
  }
  return d;
}

}  // namespace wpx
