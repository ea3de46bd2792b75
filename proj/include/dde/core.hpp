#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dde {

using Vec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance used whenever two time values are compared.
inline double time_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }
inline bool time_eq(double a, double b) {
  return std::abs(a - b) <= time_tol(std::max(std::abs(a), std::abs(b)));
}

enum class Side { Left, Right };

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A state-dependent delay evaluated to tau < 0, so the "delayed" argument
// lies in the future of t.
struct AdvanceError : Error {
  AdvanceError(double t_, int delay_, double tau_)
      : Error("delay " + std::to_string(delay_) + " became an advance at t=" +
              std::to_string(t_) + " (tau=" + std::to_string(tau_) + ")"),
        t(t_), delay(delay_), tau(tau_) {}
  double t;
  int delay;
  double tau;
};

struct BlowUpError : Error {
  BlowUpError(double t_, int stage_)
      : Error("non-finite stage value at t=" + std::to_string(t_) +
              ", stage " + std::to_string(stage_)),
        t(t_), stage(stage_) {}
  double t;
  int stage;
};

struct OutOfRangeError : Error {
  OutOfRangeError(double t_, double lo_, double hi_)
      : Error("time " + std::to_string(t_) + " outside covered range [" +
              std::to_string(lo_) + ", " + std::to_string(hi_) + "]"),
        t(t_), lo(lo_), hi(hi_) {}
  double t, lo, hi;
};

struct HistoryTooShortError : Error {
  using Error::Error;
};

struct VelocityBoundError : Error {
  using Error::Error;
};

struct BracketError : Error {
  using Error::Error;
};

struct DegenerateCrossingError : Error {
  using Error::Error;
};

struct StepUnderflowError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Delay specifications
// ---------------------------------------------------------------------------

// One threshold delay: tau(t) is defined implicitly by
//   integral over [t - tau, t] of velocity(u_component(s)) ds = a.
struct ThresholdSpec {
  std::function<double(double)> velocity;  // V, applied to one state entry
  double a = 1.0;                          // threshold constant, a > 0
  double v_min = 0.0;                      // 0 < v_min <= V <= v_max
  double v_max = 0.0;
  int component = 0;                       // which state entry feeds V

  double tau_min() const { return a / v_max; }
  double tau_max() const { return a / v_min; }
};

// Tagged delay specification. Threshold delays must be converted to
// state-dependent component reads (see threshold.hpp) before integration.
struct DelaySpec {
  enum class Kind { Constant, StateDependent, ClampedStateDependent, Threshold };

  Kind kind = Kind::Constant;
  double tau_const = 0.0;
  std::function<double(double, const Vec&)> tau_fn;  // (t, u) -> tau
  ThresholdSpec threshold;
  // Set when t - tau is known to be increasing along solutions; lets the
  // detection ledger delete crossed breaking points.
  bool monotone_alpha = false;

  static DelaySpec constant(double tau) {
    DelaySpec d;
    d.kind = Kind::Constant;
    d.tau_const = tau;
    d.monotone_alpha = true;
    return d;
  }
  static DelaySpec state_dependent(std::function<double(double, const Vec&)> fn,
                                   bool monotone = false) {
    DelaySpec d;
    d.kind = Kind::StateDependent;
    d.tau_fn = std::move(fn);
    d.monotone_alpha = monotone;
    return d;
  }
  static DelaySpec clamped_state_dependent(
      std::function<double(double, const Vec&)> fn) {
    DelaySpec d;
    d.kind = Kind::ClampedStateDependent;
    d.tau_fn = std::move(fn);
    return d;
  }
  static DelaySpec threshold_delay(ThresholdSpec spec) {
    DelaySpec d;
    d.kind = Kind::Threshold;
    d.threshold = std::move(spec);
    d.monotone_alpha = true;
    return d;
  }
};

// ---------------------------------------------------------------------------
// History function
// ---------------------------------------------------------------------------

// One smooth piece of the initial function on [lo, hi). The callable must be
// evaluable outside the interval as well (analytic extension); the detection
// algorithm relies on that.
struct HistoryPiece {
  double lo = -kInf;
  double hi = 0.0;
  std::function<Vec(double)> f;
};

struct HistoryDiscontinuity {
  double t = 0.0;
  int order = 0;  // -1 for value jumps, k >= 0 for derivative jumps
};

class HistoryFunction {
 public:
  HistoryFunction() = default;
  HistoryFunction(std::vector<HistoryPiece> pieces,
                  std::vector<HistoryDiscontinuity> discontinuities = {});

  // Constant history u(t) = value for t <= t_end.
  static HistoryFunction constant(const Vec& value, double t_end);
  static HistoryFunction constant(double value, double t_end);
  // Single smooth piece on [lo, t_end).
  static HistoryFunction smooth(std::function<Vec(double)> f, double lo,
                                double t_end);

  Vec eval(double t, Side side = Side::Left) const;
  // Evaluate the piece owning times adjacent to `boundary` on `side`,
  // analytically extended to argument t.
  Vec eval_extended(double boundary, Side side, double t) const;

  const std::vector<HistoryPiece>& pieces() const { return pieces_; }
  const std::vector<HistoryDiscontinuity>& discontinuities() const {
    return discontinuities_;
  }
  double t_start() const { return pieces_.empty() ? 0.0 : pieces_.front().lo; }
  double t_end() const { return pieces_.empty() ? 0.0 : pieces_.back().hi; }
  bool empty() const { return pieces_.empty(); }

 private:
  std::vector<HistoryPiece> pieces_;  // sorted, contiguous
  std::vector<HistoryDiscontinuity> discontinuities_;
};

// ---------------------------------------------------------------------------
// Breaking points
// ---------------------------------------------------------------------------

enum class ApproxTier { Exact, Mesh, Linear, Quadratic, Secant };

const char* tier_name(ApproxTier tier);

struct BreakingPoint {
  double xi = 0.0;
  int order = 0;            // k >= -1
  int parent_delay = -1;    // delay index that generated it, -1 if none
  double parent_xi = std::numeric_limits<double>::quiet_NaN();
  ApproxTier tier = ApproxTier::Exact;
};

// ---------------------------------------------------------------------------
// Dense solution
// ---------------------------------------------------------------------------

// Polynomial piece u(t) = sum_k coef.col(k) * theta^k with
// theta = (t - t_begin) / h. Truncated steps keep the original h scaling,
// so t_end <= t_begin + h.
struct SolutionPiece {
  double t_begin = 0.0;
  double t_end = 0.0;
  double h = 0.0;  // parameterization scale of theta
  Eigen::MatrixXd coef;

  Vec eval_theta(double theta) const;
  Vec eval(double t) const { return eval_theta((t - t_begin) / h); }
  Vec deriv(double t) const;  // du/dt
};

class DenseSolution {
 public:
  DenseSolution() = default;
  DenseSolution(HistoryFunction history, double t0, double reach,
                std::string method);

  // Value at time t. History times delegate to the HistoryFunction. At an
  // exact breaking point the left piece wins unless a side is requested.
  Vec eval(double t, std::optional<Side> side = std::nullopt) const;
  // Analytic extension of the piece adjacent to `boundary` on `side`.
  Vec eval_extended(double boundary, Side side, double t) const;
  Vec deriv(double t) const;

  void append_piece(SolutionPiece piece);
  void add_breaking_point(BreakingPoint bp) { breaking_points_.push_back(bp); }

  double t0() const { return t0_; }
  double t_end() const {
    return pieces_.empty() ? t0_ : pieces_.back().t_end;
  }
  double reach() const { return reach_; }
  const std::vector<SolutionPiece>& pieces() const { return pieces_; }
  const std::vector<BreakingPoint>& breaking_points() const {
    return breaking_points_;
  }
  const HistoryFunction& history() const { return history_; }
  const std::string& method() const { return method_; }

  // Index of the piece owning t (left convention); -1 for history times.
  int piece_index(double t, Side side = Side::Left) const;

 private:
  HistoryFunction history_;
  double t0_ = 0.0;
  double reach_ = 0.0;
  std::string method_;
  std::vector<SolutionPiece> pieces_;
  std::vector<BreakingPoint> breaking_points_;
};

// ---------------------------------------------------------------------------
// Problem definition
// ---------------------------------------------------------------------------

// Read-only view of the solution so far, handed to right-hand sides that
// need past values beyond the discrete delayed arguments (e.g. running
// integrals). Covers history, accepted steps, and the partial current stage.
class PastView {
 public:
  PastView() = default;
  explicit PastView(std::function<Vec(double)> f) : f_(std::move(f)) {}
  Vec operator()(double t) const { return f_(t); }
  bool valid() const { return static_cast<bool>(f_); }

 private:
  std::function<Vec(double)> f_;
};

// f(t, u(t), [u(alpha_1), ..., u(alpha_m)], past) -> du/dt
using Rhs = std::function<Vec(double, const Vec&, const std::vector<Vec>&,
                              const PastView&)>;

struct DdeProblem {
  int dim = 1;
  Rhs rhs;
  std::vector<DelaySpec> delays;
  HistoryFunction history;
  double t0 = 0.0;
  double tf = 1.0;
  std::string name;
  // User bound on the largest delay, used to size the history reach and the
  // detection cutoff. Threshold delays contribute a / v_min automatically.
  double max_delay_bound = 0.0;

  // How far back of t0 the history must extend.
  double reach() const;
  void validate() const;
};

// Delayed argument alpha_j(t) = t - tau_j(t, u). Throws AdvanceError when a
// StateDependent delay evaluates to tau < 0. Threshold delays cannot be
// evaluated directly; convert them first (threshold.hpp).
double delayed_argument(const DdeProblem& problem, int j, double t,
                        const Vec& u);
double delayed_argument(const DelaySpec& spec, int j, double t, const Vec& u);

}  // namespace dde
