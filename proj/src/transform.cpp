#include "wpx/transform.hpp"

#include <algorithm>
#include <cmath>

#include "wpx/fft.hpp"
#include "wpx/kernels.hpp"
#include "wpx/tent.hpp"

namespace wpx {

PhaseField::PhaseField(const PacketDictionary& d)
    : dict(&d), n(d.n), grid_size(d.grid_size) {
  slices.assign(d.packets(), std::vector<cd>(d.lattice_size(), cd(0.0)));
  low.assign(d.lattice_size(), cd(0.0));
}

void PhaseField::set_zero() {
  for (auto& s : slices) std::fill(s.begin(), s.end(), cd(0.0));
  std::fill(low.begin(), low.end(), cd(0.0));
}

PhaseField& PhaseField::operator+=(const PhaseField& o) {
  axpy(cd(1.0), o);
  return *this;
}

PhaseField& PhaseField::operator*=(cd s) {
  for (auto& sl : slices)
    for (auto& v : sl) v *= s;
  for (auto& v : low) v *= s;
  return *this;
}

void PhaseField::axpy(cd alpha, const PhaseField& o) {
  if (o.slices.size() != slices.size() || o.cells() != cells())
    throw std::invalid_argument("phase field shape mismatch");
  const auto& ops = kernels::active();
  for (std::size_t k = 0; k < slices.size(); ++k)
    ops.caxpy(alpha, o.slices[k].data(), slices[k].data(), slices[k].size());
  ops.caxpy(alpha, o.low.data(), low.data(), low.size());
}

double PhaseField::weighted_l2() const {
  const auto& ops = kernels::active();
  double cellsz = 1.0 / static_cast<double>(cells());
  double s = 0;
  for (std::size_t k = 0; k < slices.size(); ++k)
    s += dict->indices[k].w * ops.sum_sq(slices[k].data(), slices[k].size()) *
         cellsz;
  s += dict->w_low * ops.sum_sq(low.data(), low.size()) * cellsz;
  return std::sqrt(s);
}

PhaseField analyze(const RealField& f, const PacketDictionary& dict) {
  if (f.n != dict.n || f.grid_size != dict.grid_size)
    throw std::invalid_argument("analyze: field/dictionary shape mismatch");
  PhaseField F(dict);
  std::vector<cd> spec = f.spectrum();
  for (std::size_t k = 0; k < dict.packets(); ++k) {
    const auto& sl = dict.psi[k];
    auto& out = F.slices[k];
    // out is already zero; scatter the multiplier and transform back.
    for (std::size_t i = 0; i < sl.idx.size(); ++i)
      out[sl.idx[i]] = sl.val[i] * spec[sl.idx[i]];
    fft::inverse(out.data(), dict.n, dict.grid_size);
  }
  for (std::size_t i = 0; i < dict.q_slice.idx.size(); ++i)
    F.low[dict.q_slice.idx[i]] =
        dict.q_slice.val[i] * spec[dict.q_slice.idx[i]];
  fft::inverse(F.low.data(), dict.n, dict.grid_size);
  return F;
}

RealField synthesize(const PhaseField& F) {
  const PacketDictionary& dict = *F.dict;
  std::vector<cd> acc(dict.lattice_size(), cd(0.0));
  std::vector<cd> buf(dict.lattice_size());
  for (std::size_t k = 0; k < dict.packets(); ++k) {
    const auto& sl = dict.psi[k];
    if (sl.idx.empty()) continue;
    buf = F.slices[k];
    fft::forward(buf.data(), dict.n, dict.grid_size);
    double w = dict.indices[k].w;
    for (std::size_t i = 0; i < sl.idx.size(); ++i)
      acc[sl.idx[i]] += w * sl.val[i] * buf[sl.idx[i]];
  }
  buf = F.low;
  fft::forward(buf.data(), dict.n, dict.grid_size);
  for (std::size_t i = 0; i < dict.q_slice.idx.size(); ++i)
    acc[dict.q_slice.idx[i]] +=
        dict.w_low * dict.q_slice.val[i] * buf[dict.q_slice.idx[i]];
  return RealField::from_spectrum(dict.n, dict.grid_size, acc);
}

cd ww_star_kernel(const PacketDictionary& dict, const KernelPair& p) {
  // Closed-form packet factors hoisted out of the lattice loop.
  double mx = p.xi.norm(), me = p.eta.norm();
  double cx = c_norm(dict.profiles, dict.n, mx);
  double ce = c_norm(dict.profiles, dict.n, me);
  double ax = std::pow(mx, -0.5 * dict.n) * cx;
  double ae = std::pow(me, -0.5 * dict.n) * ce;
  Vec xh = p.xi.hat(), eh = p.eta.hat();
  double rx = std::sqrt(mx), re = std::sqrt(me);
  std::size_t total = dict.lattice_size();
  cd sum(0.0);
  for (std::size_t m = 0; m < total; ++m) {
    Vec z = dict.lattice_freq(m);
    double zr = z.norm();
    if (zr <= 0) continue;
    double r1 = dict.profiles.Psi(zr / mx);
    if (r1 == 0) continue;
    double r2 = dict.profiles.Psi(zr / me);
    if (r2 == 0) continue;
    Vec zh = z.hat();
    double a1 = dict.profiles.phi(rx * (zh - xh).norm());
    if (a1 == 0) continue;
    double a2 = dict.profiles.phi(re * (zh - eh).norm());
    if (a2 == 0) continue;
    double phase = z.dot(p.x - p.y);
    sum += ax * ae * r1 * r2 * a1 * a2 * cd(std::cos(phase), std::sin(phase));
  }
  return sum * std::pow(TWO_PI, -dict.n);
}

DecayReport ww_star_kernel_probe(const PacketDictionary& dict,
                                 const std::vector<KernelPair>& pairs,
                                 int N_order) {
  DecayReport rep;
  for (const auto& p : pairs) {
    DecayRow row;
    double mx = p.xi.norm(), me = p.eta.norm();
    row.upsilon = std::min(mx / me, me / mx);
    double rho = std::min(1.0 / mx, 1.0 / me);
    row.dist = quasi_dist({p.x, p.xi.hat()}, {p.y, p.eta.hat()});
    row.envelope = std::pow(row.upsilon, N_order) *
                   std::pow(1.0 + row.dist * row.dist / rho, -N_order);
    row.absK = std::abs(ww_star_kernel(dict, p));
    row.ratio = row.absK / row.envelope;
    rep.rows.push_back(row);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
  }
  return rep;
}

}  // namespace wpx
