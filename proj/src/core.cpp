#include "dde/core.hpp"

#include <algorithm>

namespace dde {

const char* tier_name(ApproxTier tier) {
  switch (tier) {
    case ApproxTier::Exact: return "exact";
    case ApproxTier::Mesh: return "mesh";
    case ApproxTier::Linear: return "linear";
    case ApproxTier::Quadratic: return "quadratic";
    case ApproxTier::Secant: return "secant";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// HistoryFunction
// ---------------------------------------------------------------------------

HistoryFunction::HistoryFunction(std::vector<HistoryPiece> pieces,
                                 std::vector<HistoryDiscontinuity> discs)
    : pieces_(std::move(pieces)), discontinuities_(std::move(discs)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const HistoryPiece& a, const HistoryPiece& b) {
              return a.lo < b.lo;
            });
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
    if (!time_eq(pieces_[i].hi, pieces_[i + 1].lo))
      throw Error("history pieces leave a gap at t=" +
                  std::to_string(pieces_[i].hi));
  }
  std::sort(discontinuities_.begin(), discontinuities_.end(),
            [](const HistoryDiscontinuity& a, const HistoryDiscontinuity& b) {
              return a.t < b.t;
            });
}

HistoryFunction HistoryFunction::constant(const Vec& value, double t_end) {
  Vec v = value;
  return HistoryFunction({{-kInf, t_end, [v](double) { return v; }}});
}

HistoryFunction HistoryFunction::constant(double value, double t_end) {
  Vec v(1);
  v[0] = value;
  return constant(v, t_end);
}

HistoryFunction HistoryFunction::smooth(std::function<Vec(double)> f,
                                        double lo, double t_end) {
  return HistoryFunction({{lo, t_end, std::move(f)}});
}

Vec HistoryFunction::eval(double t, Side side) const {
  if (pieces_.empty()) throw Error("empty history function");
  if (t < pieces_.front().lo - time_tol(t))
    throw OutOfRangeError(t, pieces_.front().lo, pieces_.back().hi);
  int idx = 0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (t < pieces_[i].hi || i + 1 == pieces_.size()) {
      idx = static_cast<int>(i);
      break;
    }
  }
  // Boundary handling: exact hits on a piece's lo belong to the previous
  // piece under the left convention.
  if (idx > 0 && time_eq(t, pieces_[idx].lo) && side == Side::Left) --idx;
  return pieces_[idx].f(t);
}

Vec HistoryFunction::eval_extended(double boundary, Side side,
                                   double t) const {
  if (pieces_.empty()) throw Error("empty history function");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const HistoryPiece& p = pieces_[i];
    if (side == Side::Left && time_eq(p.hi, boundary)) return p.f(t);
    if (side == Side::Right && time_eq(p.lo, boundary)) return p.f(t);
  }
  // Boundary interior to a piece: the piece itself is smooth across it.
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const HistoryPiece& p = pieces_[i];
    if (boundary >= p.lo && boundary <= p.hi) return p.f(t);
  }
  return pieces_.front().f(t);
}

// ---------------------------------------------------------------------------
// SolutionPiece / DenseSolution
// ---------------------------------------------------------------------------

Vec SolutionPiece::eval_theta(double theta) const {
  const int deg = static_cast<int>(coef.cols()) - 1;
  Vec v = coef.col(deg);
  for (int k = deg - 1; k >= 0; --k) v = v * theta + coef.col(k);
  return v;
}

Vec SolutionPiece::deriv(double t) const {
  const double theta = (t - t_begin) / h;
  const int deg = static_cast<int>(coef.cols()) - 1;
  Vec v = Vec::Zero(coef.rows());
  for (int k = deg; k >= 1; --k) v = v * theta + k * coef.col(k);
  return v / h;
}

DenseSolution::DenseSolution(HistoryFunction history, double t0, double reach,
                             std::string method)
    : history_(std::move(history)), t0_(t0), reach_(reach),
      method_(std::move(method)) {}

void DenseSolution::append_piece(SolutionPiece piece) {
  pieces_.push_back(std::move(piece));
}

int DenseSolution::piece_index(double t, Side side) const {
  if (pieces_.empty()) return -1;
  if (t < t0_ && !time_eq(t, t0_)) return -1;
  // Binary search on begins, then settle boundary ties by convention.
  int lo = 0, hi = static_cast<int>(pieces_.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (pieces_[mid].t_begin <= t) lo = mid;
    else hi = mid - 1;
  }
  if (side == Side::Left && lo > 0 && time_eq(t, pieces_[lo].t_begin)) --lo;
  if (side == Side::Right && lo + 1 < static_cast<int>(pieces_.size()) &&
      time_eq(t, pieces_[lo].t_end))
    ++lo;
  return lo;
}

Vec DenseSolution::eval(double t, std::optional<Side> side) const {
  const Side s = side.value_or(Side::Left);
  if (t < t0_ && !time_eq(t, t0_)) {
    if (t < t0_ - reach_ - time_tol(t))
      throw OutOfRangeError(t, t0_ - reach_, t_end());
    return history_.eval(t, s);
  }
  if (pieces_.empty()) {
    if (time_eq(t, t0_)) return history_.eval(t0_, Side::Left);
    throw OutOfRangeError(t, t0_ - reach_, t0_);
  }
  if (t > t_end() + time_tol(t)) throw OutOfRangeError(t, t0_ - reach_, t_end());
  int idx = piece_index(t, s);
  if (idx < 0) idx = 0;
  return pieces_[idx].eval(t);
}

Vec DenseSolution::eval_extended(double boundary, Side side, double t) const {
  if (boundary < t0_ + time_tol(boundary) && side == Side::Left)
    return history_.eval_extended(boundary, side, t);
  if (boundary < t0_ - time_tol(boundary))
    return history_.eval_extended(boundary, side, t);
  if (pieces_.empty()) return history_.eval_extended(boundary, side, t);
  int idx = piece_index(boundary, side);
  if (idx < 0) return history_.eval_extended(boundary, side, t);
  return pieces_[idx].eval(t);
}

Vec DenseSolution::deriv(double t) const {
  if (t < t0_ || pieces_.empty()) throw OutOfRangeError(t, t0_, t_end());
  int idx = piece_index(t, Side::Left);
  return pieces_[idx].deriv(t);
}

// ---------------------------------------------------------------------------
// DdeProblem
// ---------------------------------------------------------------------------

double DdeProblem::reach() const {
  double r = max_delay_bound;
  for (const DelaySpec& d : delays) {
    switch (d.kind) {
      case DelaySpec::Kind::Constant: r = std::max(r, d.tau_const); break;
      case DelaySpec::Kind::Threshold:
        r = std::max(r, d.threshold.tau_max());
        break;
      default: break;  // covered by max_delay_bound
    }
  }
  return r;
}

void DdeProblem::validate() const {
  if (dim < 1) throw Error("problem dimension must be >= 1");
  if (!(tf > t0)) throw Error("problem requires tf > t0");
  if (!rhs) throw Error("problem has no right-hand side");
  for (std::size_t j = 0; j < delays.size(); ++j) {
    const DelaySpec& d = delays[j];
    if (d.kind == DelaySpec::Kind::Constant && d.tau_const < 0)
      throw Error("constant delay " + std::to_string(j) + " is negative");
    if (d.kind == DelaySpec::Kind::Threshold && !(d.threshold.a > 0))
      throw Error("threshold delay " + std::to_string(j) + " needs a > 0");
  }
}

double delayed_argument(const DelaySpec& spec, int j, double t, const Vec& u) {
  switch (spec.kind) {
    case DelaySpec::Kind::Constant:
      return t - spec.tau_const;
    case DelaySpec::Kind::StateDependent: {
      const double tau = spec.tau_fn(t, u);
      if (tau < -time_tol(t)) throw AdvanceError(t, j, tau);
      return t - std::max(tau, 0.0);
    }
    case DelaySpec::Kind::ClampedStateDependent: {
      const double tau = spec.tau_fn(t, u);
      return std::min(t, t - tau);
    }
    case DelaySpec::Kind::Threshold:
      throw Error("threshold delay must be reformulated before evaluation");
  }
  throw Error("unknown delay kind");
}

double delayed_argument(const DdeProblem& problem, int j, double t,
                        const Vec& u) {
  return delayed_argument(problem.delays.at(j), j, t, u);
}

}  // namespace dde
