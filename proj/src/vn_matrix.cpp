#include "vnlab/vn_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace vnlab::vn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex unit_root(std::int64_t num, std::int64_t den) {
  const std::int64_t r = ((num % den) + den) % den;
  const double t = kTwoPi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(t), std::sin(t)};
}

std::int64_t wrap(std::int64_t a, std::int64_t d) {
  const std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

Matrix compress(const Matrix& B, const std::vector<int>& idx) {
  const int s = static_cast<int>(idx.size());
  Matrix out(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) out(i, j) = B(idx[i], idx[j]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Systems

MatrixSystem MatrixSystem::from_unitary(Matrix U) {
  if (U.rows() != U.cols() || U.rows() == 0) throw std::invalid_argument("U must be square");
  const int d = static_cast<int>(U.rows());
  const double dev = (U * U.adjoint() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > kUnitaryTolerance) throw std::invalid_argument("U is not unitary");
  Matrix off = U;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() == 0.0) return diagonal(U.diagonal());
  MatrixSystem s;
  s.d_ = d;
  s.U_ = std::move(U);
  return s;
}

MatrixSystem MatrixSystem::diagonal(Vector phases) {
  for (int j = 0; j < phases.size(); ++j)
    if (std::abs(std::abs(phases[j]) - 1.0) > kUnitaryTolerance)
      throw std::invalid_argument("phase of modulus != 1");
  MatrixSystem s;
  s.d_ = static_cast<int>(phases.size());
  s.diagonal_ = true;
  s.U_ = phases.asDiagonal();
  s.phases_ = std::move(phases);
  return s;
}

MatrixSystem MatrixSystem::rational_phases(std::vector<std::int64_t> num, std::int64_t den) {
  if (den <= 0 || num.empty()) throw std::invalid_argument("bad rational phases");
  Vector ph(static_cast<int>(num.size()));
  for (std::size_t j = 0; j < num.size(); ++j) ph[j] = unit_root(num[j], den);
  MatrixSystem s = diagonal(std::move(ph));
  std::int64_t g = den;
  for (auto v : num) g = std::gcd(g, wrap(v - num[0], den));
  s.num_ = std::move(num);
  s.den_ = den;
  s.period_ = den / g;
  return s;
}

MatrixSystem MatrixSystem::negns(int d) {
  std::vector<std::int64_t> num(d);
  std::iota(num.begin(), num.end(), 0);
  return rational_phases(std::move(num), d);
}

Vector MatrixSystem::phase_power(std::int64_t n) const {
  if (!diagonal_) throw std::logic_error("phase_power needs a diagonal shift");
  Vector out(d_);
  for (int j = 0; j < d_; ++j) {
    if (den_ > 0) {
      // Reduce num*n mod den without overflow for moderate n.
      const std::int64_t r = wrap(wrap(num_[j], den_) * wrap(n, den_) % den_, den_);
      out[j] = unit_root(r, den_);
    } else {
      const double t = std::arg(phases_[j]) * static_cast<double>(n);
      out[j] = {std::cos(t), std::sin(t)};
    }
  }
  return out;
}

Matrix MatrixSystem::shift(const Matrix& B, std::int64_t n) const {
  if (diagonal_) {
    const Vector p = phase_power(n);
    Matrix out(B.rows(), B.cols());
    for (int k = 0; k < B.cols(); ++k)
      for (int j = 0; j < B.rows(); ++j) out(j, k) = p[j] * B(j, k) * std::conj(p[k]);
    return out;
  }
  Matrix out = B;
  if (n >= 0) {
    for (std::int64_t i = 0; i < n; ++i) out = U_ * out * U_.adjoint();
  } else {
    for (std::int64_t i = 0; i < -n; ++i) out = U_.adjoint() * out * U_;
  }
  return out;
}

Complex trace(const Matrix& B) { return B.trace() / static_cast<double>(B.rows()); }

bool is_hermitian(const Matrix& B, double tol) {
  return B.rows() == B.cols() && (B - B.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::vector<int> active_support(const Matrix& B) {
  std::vector<int> idx;
  for (int j = 0; j < B.rows(); ++j)
    if (B.row(j).cwiseAbs().maxCoeff() > 0.0 || B.col(j).cwiseAbs().maxCoeff() > 0.0)
      idx.push_back(j);
  return idx;
}

// ---------------------------------------------------------------------------
// The negative-average matrix

Complex negav_summand(std::int64_t r) {
  const Complex w = unit_root(r, 3);
  const Complex w2 = unit_root(-2 * r, 3);
  return (1.0 + w) * (1.0 + w) * (1.0 + w2);
}

PSDWitness build_negav_matrix(const comb::CyclicSet& E) {
  const std::int64_t d = E.modulus();
  if (d % 3 != 0) throw std::invalid_argument("d must be a multiple of 3");
  PSDWitness w;
  w.A = Matrix::Zero(d, d);
  for (auto j : E.members())
    for (auto k : E.members()) w.A(j, k) = 1.0 + unit_root(k - j, 3);
  w.eigen_floor = eigen_floor(w.A);
  return w;
}

double eigen_floor(const Matrix& A) {
  const auto idx = active_support(A);
  if (idx.empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(compress(A, idx), Eigen::EigenvaluesOnly);
  double floor = es.eigenvalues().minCoeff();
  if (static_cast<int>(idx.size()) < A.rows()) floor = std::min(floor, 0.0);
  return floor;
}

double restricted_third_moment(const Matrix& A) {
  const std::int64_t d = A.rows();
  const auto idx = active_support(A);
  std::vector<char> active(d, 0);
  for (int j : idx) active[j] = 1;
  Complex total{};
  for (int n : idx)
    for (std::int64_t r = 0; r < d; ++r) {
      const std::int64_t p = wrap(n + r, d), q = wrap(n + 2 * r, d);
      if (!active[p] || !active[q]) continue;
      total += A(n, p) * A(p, q) * A(q, n);
    }
  return total.real();
}

// ---------------------------------------------------------------------------
// Multiple traces and their averages

namespace {

// multi_trace for a diagonal shift, with a already compressed to its
// active support idx.
Complex diagonal_multi_trace(const MatrixSystem& sys, const Matrix& s, const std::vector<int>& idx,
                             std::int64_t n, int k) {
  if (idx.empty()) return 0.0;
  const double d = static_cast<double>(sys.dim());
  Vector p(static_cast<int>(idx.size()));
  Matrix acc = s;
  for (int i = 1; i < k; ++i) {
    const Vector full = sys.phase_power(n * i);
    for (std::size_t t = 0; t < idx.size(); ++t) p[t] = full[idx[t]];
    const Matrix shifted = p.asDiagonal() * s * p.conjugate().asDiagonal();
    if (i + 1 < k) {
      acc = acc * shifted;
    } else {
      return acc.cwiseProduct(shifted.transpose()).sum() / d;
    }
  }
  return acc.trace() / d;
}

}  // namespace

Complex multi_trace(const MatrixSystem& sys, const Matrix& a, std::int64_t n, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const int d = sys.dim();
  if (a.rows() != d || a.cols() != d) throw std::invalid_argument("dimension mismatch");
  if (sys.is_diagonal()) {
    // Entries outside the active support of a stay zero under every shift.
    const auto idx = active_support(a);
    return diagonal_multi_trace(sys, compress(a, idx), idx, n, k);
  }
  Matrix acc = a;
  for (int i = 1; i < k; ++i) acc = acc * sys.shift(a, n * i);
  return trace(acc);
}

std::optional<std::int64_t> detect_period(const MatrixSystem& sys, std::int64_t max_period,
                                          double tol) {
  if (sys.exact_period()) return sys.exact_period();
  if (!sys.is_diagonal()) {
    // alpha^p = id iff U^p is a scalar multiple of the identity.
    Matrix P = Matrix::Identity(sys.dim(), sys.dim());
    for (std::int64_t p = 1; p <= max_period; ++p) {
      P = P * sys.unitary();
      const Complex c = P(0, 0);
      if (std::abs(std::abs(c) - 1.0) < tol &&
          (P - c * Matrix::Identity(sys.dim(), sys.dim())).cwiseAbs().maxCoeff() < tol)
        return p;
    }
    return std::nullopt;
  }
  const Vector& ph = sys.phases();
  for (std::int64_t p = 1; p <= max_period; ++p) {
    bool ok = true;
    for (int j = 1; j < ph.size() && ok; ++j) {
      const double t = std::arg(ph[j] / ph[0]) * static_cast<double>(p) / kTwoPi;
      ok = std::abs(t - std::round(t)) < tol * static_cast<double>(p);
    }
    if (ok) return p;
  }
  return std::nullopt;
}

CesaroResult cesaro_limit(const MatrixSystem& sys, const Matrix& a, int k,
                          const CesaroOptions& opt) {
  CesaroResult res;
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (a.rows() != sys.dim() || a.cols() != sys.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<int> idx;
  Matrix s;
  if (sys.is_diagonal()) {
    idx = active_support(a);
    s = compress(a, idx);
  }
  auto term = [&](std::int64_t n) {
    return sys.is_diagonal() ? diagonal_multi_trace(sys, s, idx, n, k) : multi_trace(sys, a, n, k);
  };
  if (auto p = detect_period(sys, opt.max_period)) {
    Complex sum{};
    for (std::int64_t n = 0; n < *p; ++n) sum += term(n);
    res.value = sum / static_cast<double>(*p);
    res.period = *p;
    res.exact = true;
    res.samples = *p;
    return res;
  }
  if (!opt.allow_fallback) throw PeriodUndetected("shift phases are not commensurate");
  Complex sum{};
  for (std::int64_t n = -opt.fallback_N; n <= opt.fallback_N; ++n) sum += term(n);
  res.samples = 2 * opt.fallback_N + 1;
  res.value = sum / static_cast<double>(res.samples);
  return res;
}

Matrix shift_average(const MatrixSystem& sys, const Matrix& a) {
  const auto p = detect_period(sys, 1 << 16);
  if (!p) throw PeriodUndetected("shift phases are not commensurate");
  Matrix sum = Matrix::Zero(a.rows(), a.cols());
  const std::int64_t start = -(*p / 2);
  for (std::int64_t n = start; n < start + *p; ++n) sum += sys.shift(a, n);
  return sum / static_cast<double>(*p);
}

Matrix diagonal_part(const Matrix& a) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  out.diagonal() = a.diagonal();
  return out;
}

Matrix triple_average(const MatrixSystem& sys, const Matrix& a, const Matrix& b, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  Matrix sum = Matrix::Zero(a.rows(), a.cols());
  for (std::int64_t n = 1; n <= N; ++n) sum += sys.shift(a, n) * sys.shift(b, 2 * n);
  return sum / static_cast<double>(N);
}

// ---------------------------------------------------------------------------
// Square roots and the crossed-product trace

Matrix psd_factor(const Matrix& A) {
  if (!is_hermitian(A)) throw NotPSD("matrix is not Hermitian");
  const auto idx = active_support(A);
  Matrix b = Matrix::Zero(A.rows(), A.cols());
  if (idx.empty()) return b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(compress(A, idx));
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < kNotPsdFloor) throw NotPSD("eigenvalue below the PSD floor");
  for (int i = 0; i < ev.size(); ++i) ev[i] = std::sqrt(std::max(ev[i], 0.0));
  const Matrix root = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) b(idx[i], idx[j]) = root(i, j);
  return b;
}

namespace {

// Window sums of w_{xy}(z) = b(x,z) conj(b(y,z)) over cyclic residue
// intervals of z, for x, y, z in the support of b.
class AutocorrelationTable {
 public:
  AutocorrelationTable(const Matrix& b, const std::vector<int>& support)
      : d_(b.rows()), s_(support), pos_(d_, -1) {
    const int n = static_cast<int>(s_.size());
    for (int i = 0; i < n; ++i) pos_[s_[i]] = i;
    prefix_.assign(static_cast<std::size_t>(n) * n * (n + 1), Complex{});
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        Complex* p = &prefix_[(static_cast<std::size_t>(x) * n + y) * (n + 1)];
        for (int z = 0; z < n; ++z) p[z + 1] = p[z] + b(s_[x], s_[z]) * std::conj(b(s_[y], s_[z]));
      }
  }

  int slot(std::int64_t residue) const { return pos_[residue]; }

  // g_h(x) for support slots of x and x+h.
  Complex g(int xs, int ys, std::int64_t x, std::int64_t h, std::int64_t L) const {
    const std::int64_t ah = h < 0 ? -h : h;
    if (ah >= L) return 0.0;
    const std::int64_t j_lo = std::max<std::int64_t>(1, 1 - h);
    const std::int64_t count = L - ah;
    const std::int64_t z0 = wrap(x + h + j_lo, d_);
    const Complex* p = row(xs, ys);
    const int n = static_cast<int>(s_.size());
    return static_cast<double>(count / d_) * p[n] + window(p, z0, count % d_);
  }

 private:
  const Complex* row(int xs, int ys) const {
    const std::size_t n = s_.size();
    return &prefix_[(static_cast<std::size_t>(xs) * n + ys) * (n + 1)];
  }
  // Number of support residues below t.
  int below(std::int64_t t) const {
    return static_cast<int>(std::lower_bound(s_.begin(), s_.end(), t) - s_.begin());
  }
  Complex window(const Complex* p, std::int64_t z0, std::int64_t len) const {
    if (len == 0) return 0.0;
    const std::int64_t end = z0 + len;
    if (end <= d_) return p[below(end)] - p[below(z0)];
    const int n = static_cast<int>(s_.size());
    return (p[n] - p[below(z0)]) + p[below(end - d_)];
  }

  std::int64_t d_;
  std::vector<int> s_;
  std::vector<int> pos_;
  std::vector<Complex> prefix_;
};

}  // namespace

double has_sum(const Matrix& b, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  const std::int64_t d = b.rows();
  const std::int64_t L = N * d;
  const auto support = active_support(b);
  const AutocorrelationTable table(b, support);
  // g_h(x) vanishes unless x and x+h lie in the support, so only
  // progressions x-h, x, x+h inside the support contribute.
  Complex total{};
  for (int x : support) {
    const int xs = table.slot(x);
    for (int y : support) {
      const std::int64_t rho = wrap(y - x, d);
      const int ws = table.slot(wrap(x - rho, d));
      if (ws < 0) continue;
      const int ys = table.slot(y);
      const std::int64_t w = wrap(x - rho, d);
      // h = rho + t d with |2h| < L.
      for (std::int64_t h = rho - d * ((L / 2) / d + 1); h < L; h += d) {
        if (2 * (h < 0 ? -h : h) >= L) continue;
        total += table.g(xs, ys, x, h, L) * table.g(ys, ws, y, -2 * h, L) *
                 table.g(ws, xs, w, h, L);
      }
    }
  }
  return total.real() / static_cast<double>(d);
}

double tao_prediction(const Matrix& A) {
  return kHasConstant * restricted_third_moment(A) / static_cast<double>(A.rows());
}

// ---------------------------------------------------------------------------
// Eigen-decomposition of the shift

ReversibleSplit reversible_split(const MatrixSystem& sys) {
  const int d = sys.dim();
  const int D = d * d;
  const Matrix& U = sys.unitary();
  // vec(U B U*) = (conj(U) kron U) vec(B) in column-major order.
  Matrix S(D, D);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) S(a * d + c, b * d + e) = std::conj(U(a, b)) * U(c, e);
  // S is unitary, hence normal: its Schur vectors are eigenvectors.
  Eigen::ComplexSchur<Matrix> schur(S);
  const Matrix& Q = schur.matrixU();
  const Matrix& T = schur.matrixT();

  ReversibleSplit out;
  const double scale = std::sqrt(static_cast<double>(d));
  Matrix basis(D, D);
  for (int i = 0; i < D; ++i) {
    const Complex lambda = T(i, i);
    Matrix v(d, d);
    for (int col = 0; col < d; ++col)
      for (int row = 0; row < d; ++row) v(row, col) = scale * Q(col * d + row, i);
    out.max_residual =
        std::max(out.max_residual, (sys.shift(v, 1) - lambda * v).cwiseAbs().maxCoeff());
    out.eigenvalues.push_back(lambda);
    out.eigen_operators.push_back(v);
    basis.col(i) = Q.col(i);
  }
  // <a, b> = tau(a* b).
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      const Complex g = trace(out.eigen_operators[i].adjoint() * out.eigen_operators[j]);
      out.gram_deviation = std::max(out.gram_deviation, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  qr.setThreshold(1e-9);
  out.stable_dimension = D - static_cast<int>(qr.rank());
  return out;
}

}  // namespace vnlab::vn
