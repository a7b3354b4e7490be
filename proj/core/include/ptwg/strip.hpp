#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ptwg {

/// Truncated strip [-L, L] x [-d, d] with a uniform tensor grid.
///
/// Nodes are numbered with the transverse index fastest: node(i, j) = i * (n2 + 1) + j,
/// i = 0..n1 along x1 and j = 0..n2 along x2. Row j = n2 lies on the upper boundary
/// x2 = +d and row j = 0 on the lower boundary x2 = -d; columns i = 0 and i = n1 are the
/// truncation ends.
struct StripGeometry {
  double d = 1.0;
  double L = 10.0;
  int n1 = 400;
  int n2 = 16;

  /// Validating constructor; throws grid_too_coarse / invalid_argument.
  static StripGeometry make(double d, double L, int n1, int n2);
  void validate() const;

  double h1() const noexcept { return 2.0 * L / n1; }
  double h2() const noexcept { return 2.0 * d / n2; }
  double x1(int i) const noexcept { return -L + h1() * i; }
  double x2(int j) const noexcept { return -d + h2() * j; }
  int node(int i, int j) const noexcept { return i * (n2 + 1) + j; }
  int nodes() const noexcept { return (n1 + 1) * (n2 + 1); }

  /// Same spacing, longer truncation: L' = factor * L with n1 scaled to keep h1.
  StripGeometry extended(double factor) const;

  bool operator==(const StripGeometry&) const = default;
};

/// A real boundary function of x1 sampled on the longitudinal grid, with centered
/// divided differences and its limiting value at |x1| -> infinity.
class BoundaryProfile {
 public:
  BoundaryProfile() = default;

  static BoundaryProfile from_samples(const StripGeometry& geom, Eigen::VectorXd values,
                                      double asymptote);
  static BoundaryProfile from_function(const StripGeometry& geom,
                                       const std::function<double(double)>& f, double asymptote);
  static BoundaryProfile constant(const StripGeometry& geom, double value);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  const Eigen::VectorXd& first_derivative() const noexcept { return d1_; }
  const Eigen::VectorXd& second_derivative() const noexcept { return d2_; }
  double asymptote() const noexcept { return asymptote_; }
  double h1() const noexcept { return h1_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

  bool is_zero() const { return values_.size() == 0 || values_.cwiseAbs().maxCoeff() == 0.0; }
  double max_abs() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

  /// True if |value - asymptote| < tail_tol on the outer `outer_fraction` of [-L, L].
  bool is_localized(double tail_tol, double outer_fraction = 0.1) const;

  /// a * this + b * other, sample-wise (derivatives recomputed).
  BoundaryProfile combined(double a, const BoundaryProfile& other, double b) const;
  BoundaryProfile scaled(double a) const;
  /// Same samples on a longer grid with equal spacing, padded with the asymptote.
  BoundaryProfile extended_to(const StripGeometry& geom) const;

 private:
  BoundaryProfile(Eigen::VectorXd values, double h1, double asymptote);

  Eigen::VectorXd values_;
  Eigen::VectorXd d1_;
  Eigen::VectorXd d2_;
  double asymptote_ = 0.0;
  double h1_ = 0.0;
  double L_ = 0.0;
};

double gaussian_bump(double x, double amplitude, double width, double center);
/// amplitude * exp(1 - 1 / (1 - s^2)) for s = (x - center) / width in (-1, 1), else 0.
double compact_bump(double x, double amplitude, double width, double center);

struct BumpTerm {
  enum class Kind { gaussian, compact };
  Kind kind = Kind::gaussian;
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;

  bool operator==(const BumpTerm&) const = default;
};

/// Declarative profile: baseline + sum of bumps, or a two-column table (x1, value)
/// resampled linearly onto the grid (constant extension outside the table range).
struct ProfileSpec {
  double baseline = 0.0;
  std::vector<BumpTerm> terms;
  std::optional<std::string> table;

  bool operator==(const ProfileSpec&) const = default;
};

using ProfileTable = std::vector<std::pair<double, double>>;

/// Parses whitespace/comma separated (x1, value) rows; '#' starts a comment.
ProfileTable read_profile_table(std::istream& in);
BoundaryProfile resample_table(const StripGeometry& geom, const ProfileTable& table);
BoundaryProfile sample_profile(const StripGeometry& geom, const ProfileSpec& spec,
                               const std::filesystem::path& base_dir = {});

/// The full problem statement: operator with boundary function t * alpha + epsilon * beta.
struct WaveguideScenario {
  StripGeometry geometry;
  BoundaryProfile alpha;
  BoundaryProfile beta;
  double epsilon = 0.0;
  double t = 1.0;

  void validate() const;
  BoundaryProfile effective_profile() const;
  /// Longer truncation with the same spacing; profiles padded with their asymptotes.
  WaveguideScenario extended(double factor) const;
};

}  // namespace ptwg
