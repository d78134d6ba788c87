#include "wpx/field.hpp"

#include <cstdio>
#include <fstream>

#include "nlohmann/json.hpp"
#include "wpx/fft.hpp"
#include "wpx/kernels.hpp"

namespace wpx {

Vec RealField::point(std::size_t m) const {
  Vec x(n);
  double h = TWO_PI / grid_size;
  for (int i = n - 1; i >= 0; --i) {
    x[i] = h * static_cast<double>(m % grid_size);
    m /= grid_size;
  }
  return x;
}

double RealField::l2_norm() const {
  double s = kernels::active().sum_sq(data.data(), data.size());
  return std::sqrt(s / static_cast<double>(data.size()));
}

RealField& RealField::operator+=(const RealField& o) {
  if (o.size() != size()) throw std::invalid_argument("field shape mismatch");
  kernels::active().caxpy(cd(1.0), o.data.data(), data.data(), size());
  return *this;
}

RealField& RealField::operator-=(const RealField& o) {
  if (o.size() != size()) throw std::invalid_argument("field shape mismatch");
  kernels::active().caxpy(cd(-1.0), o.data.data(), data.data(), size());
  return *this;
}

RealField& RealField::operator*=(cd s) {
  for (auto& v : data) v *= s;
  return *this;
}

std::vector<cd> RealField::spectrum() const {
  std::vector<cd> spec = data;
  fft::forward(spec.data(), n, grid_size);
  return spec;
}

RealField RealField::from_spectrum(int n, int N, const std::vector<cd>& spec) {
  RealField f(n, N);
  if (spec.size() != f.size()) throw std::invalid_argument("spectrum size");
  f.data = spec;
  fft::inverse(f.data.data(), n, N);
  return f;
}

double rel_l2_error(const RealField& a, const RealField& b) {
  RealField d = a;
  d -= b;
  double nb = b.l2_norm();
  return nb > 0 ? d.l2_norm() / nb : d.l2_norm();
}

RealField random_band_limited(int n, int N, double kmin, double kmax,
                              std::uint64_t seed, std::uint64_t tag) {
  auto rng = make_rng(seed, 0x6669656c64ull ^ tag);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RealField f(n, N);
  std::vector<cd> spec(f.size(), cd(0.0));
  std::size_t total = f.size();
  for (std::size_t m = 0; m < total; ++m) {
    std::size_t rem = m;
    double mag2 = 0;
    for (int i = n - 1; i >= 0; --i) {
      int k = static_cast<int>(rem % N);
      rem /= N;
      double zi = fft_freq(k, N);
      mag2 += zi * zi;
    }
    // Draw for every bin to keep the stream layout independent of the band.
    double re = gauss(rng), im = gauss(rng);
    double mag = std::sqrt(mag2);
    if (mag >= kmin && mag <= kmax) spec[m] = cd(re, im);
  }
  f = RealField::from_spectrum(n, N, spec);
  f.band_limit = static_cast<int>(std::ceil(kmax));
  double nrm = f.l2_norm();
  if (nrm > 0) f *= cd(1.0 / nrm);
  return f;
}

void save_field(const RealField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for write: " + path);
  out.write(reinterpret_cast<const char*>(f.data.data()),
            static_cast<std::streamsize>(f.size() * sizeof(cd)));
  if (!out) throw io_error("write failed: " + path);
  nlohmann::json side = {{"n", f.n},
                         {"grid_size", f.grid_size},
                         {"band_limit", f.band_limit}};
  std::ofstream js(path + ".json");
  if (!js) throw io_error("cannot open sidecar: " + path + ".json");
  js << side.dump(2) << "\n";
}

RealField load_field(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw io_error("missing sidecar: " + path + ".json");
  nlohmann::json side;
  try {
    js >> side;
  } catch (const std::exception& e) {
    throw io_error("bad sidecar " + path + ".json: " + e.what());
  }
  RealField f(side.at("n").get<int>(), side.at("grid_size").get<int>());
  f.band_limit = side.at("band_limit").get<int>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  in.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.size() * sizeof(cd)));
  if (static_cast<std::size_t>(in.gcount()) != f.size() * sizeof(cd))
    throw io_error("truncated field file: " + path);
  return f;
}

}  // namespace wpx
