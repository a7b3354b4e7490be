#include "ptwg/strip.hpp"

#include "ptwg/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace ptwg {

StripGeometry StripGeometry::make(double d, double L, int n1, int n2) {
  StripGeometry g{d, L, n1, n2};
  g.validate();
  return g;
}

void StripGeometry::validate() const {
  if (!(std::isfinite(d) && d > 0.0) || !(std::isfinite(L) && L > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "strip half-width d and truncation L must be positive");
  }
  if (n1 < 8 || n2 < 4) {
    throw Error(ErrorCode::grid_too_coarse,
                "grid needs n1 >= 8 and n2 >= 4 (got n1=" + std::to_string(n1) +
                    ", n2=" + std::to_string(n2) + ")");
  }
  if (!std::isfinite(h1()) || !std::isfinite(h2()) || h1() <= 0.0 || h2() <= 0.0) {
    throw Error(ErrorCode::non_finite, "grid spacing is not finite");
  }
}

StripGeometry StripGeometry::extended(double factor) const {
  if (!(factor >= 1.0)) throw Error(ErrorCode::invalid_argument, "extension factor must be >= 1");
  // keep the parity of n1 so the old nodes embed symmetrically
  const int n1_new = n1 + 2 * static_cast<int>(std::lround(n1 * (factor - 1.0) / 2.0));
  return StripGeometry::make(d, h1() * n1_new / 2.0, n1_new, n2);
}

BoundaryProfile::BoundaryProfile(Eigen::VectorXd values, double h1, double asymptote)
    : values_(std::move(values)), asymptote_(asymptote), h1_(h1) {
  const Eigen::Index n = values_.size();
  L_ = h1 * static_cast<double>(n - 1) / 2.0;
  d1_.setZero(n);
  d2_.setZero(n);
  const double inv2h = 1.0 / (2.0 * h1);
  const double invh2 = 1.0 / (h1 * h1);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    d1_[i] = (values_[i + 1] - values_[i - 1]) * inv2h;
    d2_[i] = (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) * invh2;
  }
  // one-sided second-order stencils at the truncation ends
  const auto& f = values_;
  d1_[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  d1_[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
  d2_[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invh2;
  d2_[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * invh2;
}

BoundaryProfile BoundaryProfile::from_samples(const StripGeometry& geom, Eigen::VectorXd values,
                                              double asymptote) {
  geom.validate();
  if (values.size() != geom.n1 + 1) {
    throw Error(ErrorCode::dimension_mismatch,
                "profile has " + std::to_string(values.size()) + " samples, grid needs " +
                    std::to_string(geom.n1 + 1));
  }
  if (!values.allFinite() || !std::isfinite(asymptote)) {
    throw Error(ErrorCode::non_finite, "profile samples must be finite");
  }
  return BoundaryProfile(std::move(values), geom.h1(), asymptote);
}

BoundaryProfile BoundaryProfile::from_function(const StripGeometry& geom,
                                               const std::function<double(double)>& f,
                                               double asymptote) {
  Eigen::VectorXd v(geom.n1 + 1);
  for (int i = 0; i <= geom.n1; ++i) v[i] = f(geom.x1(i));
  return from_samples(geom, std::move(v), asymptote);
}

BoundaryProfile BoundaryProfile::constant(const StripGeometry& geom, double value) {
  return from_samples(geom, Eigen::VectorXd::Constant(geom.n1 + 1, value), value);
}

bool BoundaryProfile::is_localized(double tail_tol, double outer_fraction) const {
  const Eigen::Index n = values_.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = -L_ + h1_ * static_cast<double>(i);
    if (std::abs(x) >= (1.0 - outer_fraction) * L_ &&
        std::abs(values_[i] - asymptote_) >= tail_tol) {
      return false;
    }
  }
  return true;
}

BoundaryProfile BoundaryProfile::combined(double a, const BoundaryProfile& other, double b) const {
  if (other.values_.size() != values_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "profiles sampled on different grids");
  }
  return BoundaryProfile(a * values_ + b * other.values_, h1_,
                         a * asymptote_ + b * other.asymptote_);
}

BoundaryProfile BoundaryProfile::extended_to(const StripGeometry& geom) const {
  const Eigen::Index n_new = geom.n1 + 1;
  const Eigen::Index extra = n_new - values_.size();
  if (extra < 0 || extra % 2 != 0 || std::abs(geom.h1() - h1_) > 1e-12 * h1_) {
    throw Error(ErrorCode::dimension_mismatch, "target grid does not extend the profile grid");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n_new, asymptote_);
  v.segment(extra / 2, values_.size()) = values_;
  return BoundaryProfile(std::move(v), h1_, asymptote_);
}

BoundaryProfile BoundaryProfile::scaled(double a) const {
  return BoundaryProfile(a * values_, h1_, a * asymptote_);
}

double gaussian_bump(double x, double amplitude, double width, double center) {
  const double s = (x - center) / width;
  return amplitude * std::exp(-s * s);
}

double compact_bump(double x, double amplitude, double width, double center) {
  const double s = (x - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

ProfileTable read_profile_table(std::istream& in) {
  ProfileTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0;
    double v = 0.0;
    if (!(row >> x)) continue;
    if (!(row >> v) || !std::isfinite(x) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument,
                  "profile table line " + std::to_string(lineno) + ": expected two numbers");
    }
    table.emplace_back(x, v);
  }
  if (table.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "profile table needs at least two rows");
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].first > table[i - 1].first)) {
      throw Error(ErrorCode::invalid_argument, "profile table x1 column must be increasing");
    }
  }
  return table;
}

BoundaryProfile resample_table(const StripGeometry& geom, const ProfileTable& table) {
  if (table.size() < 2) throw Error(ErrorCode::invalid_argument, "profile table too short");
  auto value_at = [&](double x) {
    if (x <= table.front().first) return table.front().second;
    if (x >= table.back().first) return table.back().second;
    auto it = std::upper_bound(table.begin(), table.end(), x,
                               [](double v, const auto& row) { return v < row.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (x - lo.first) / (hi.first - lo.first);
    return (1.0 - w) * lo.second + w * hi.second;
  };
  const double asymptote = 0.5 * (table.front().second + table.back().second);
  return BoundaryProfile::from_function(geom, value_at, asymptote);
}

BoundaryProfile sample_profile(const StripGeometry& geom, const ProfileSpec& spec,
                               const std::filesystem::path& base_dir) {
  if (spec.table) {
    std::filesystem::path p(*spec.table);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open profile table " + p.string());
    return resample_table(geom, read_profile_table(in));
  }
  auto f = [&spec](double x) {
    double v = spec.baseline;
    for (const auto& term : spec.terms) {
      v += term.kind == BumpTerm::Kind::gaussian
               ? gaussian_bump(x, term.amplitude, term.width, term.center)
               : compact_bump(x, term.amplitude, term.width, term.center);
    }
    return v;
  };
  for (const auto& term : spec.terms) {
    if (!(term.width > 0.0)) throw Error(ErrorCode::invalid_argument, "bump width must be positive");
  }
  return BoundaryProfile::from_function(geom, f, spec.baseline);
}

void WaveguideScenario::validate() const {
  geometry.validate();
  if (!std::isfinite(epsilon) || !std::isfinite(t)) {
    throw Error(ErrorCode::non_finite, "scenario epsilon and t must be finite");
  }
  if (alpha.size() != geometry.n1 + 1) {
    throw Error(ErrorCode::dimension_mismatch, "alpha is not sampled on the scenario grid");
  }
  if (epsilon != 0.0 && beta.size() != geometry.n1 + 1) {
    throw Error(ErrorCode::invalid_argument, "beta must be defined when epsilon != 0");
  }
}

WaveguideScenario WaveguideScenario::extended(double factor) const {
  WaveguideScenario out = *this;
  out.geometry = geometry.extended(factor);
  out.alpha = alpha.extended_to(out.geometry);
  if (beta.size() > 0) out.beta = beta.extended_to(out.geometry);
  return out;
}

BoundaryProfile WaveguideScenario::effective_profile() const {
  validate();
  if (epsilon == 0.0) return alpha.scaled(t);
  return alpha.combined(t, beta, epsilon);
}

}  // namespace ptwg
