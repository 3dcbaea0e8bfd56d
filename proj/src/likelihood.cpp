#include "disorder/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "disorder/errors.hpp"

namespace disorder {

namespace {

// Factors below this are multiplied in log space.
constexpr double kUnderflowGuard = 1e-300;

void check_pair(const ModelSpec& spec, std::size_t i, std::size_t j) {
  if (i >= spec.l0() || j >= spec.l1()) throw std::out_of_range("kernel pair index out of range");
}

void check_length(const ObservationWindow& window, std::size_t l) {
  if (window.size() != l + 2) {
    throw std::invalid_argument("window length " + std::to_string(window.size()) +
                                " does not match l + 2 = " + std::to_string(l + 2));
  }
}

void check_mixture_args(const ModelSpec& spec, const PairMatrix& gamma, const PairMatrix& delta) {
  if (gamma.rows() != spec.l0() || gamma.cols() != spec.l1() || !gamma.same_shape(delta)) {
    throw std::invalid_argument("mixture weights do not match l0 x l1");
  }
}

}  // namespace

ObservationWindow ObservationWindow::shifted(Symbol next) const {
  std::vector<Symbol> out(symbols_.begin() + (symbols_.empty() ? 0 : 1), symbols_.end());
  out.push_back(next);
  return ObservationWindow(std::move(out));
}

ObservationWindow ObservationWindow::appended(Symbol next, std::size_t max_length) const {
  std::vector<Symbol> out = symbols_;
  out.push_back(next);
  if (out.size() > max_length) out.erase(out.begin(), out.end() - max_length);
  return ObservationWindow(std::move(out));
}

ObservationWindow ObservationWindow::slice(std::size_t first, std::size_t count) const {
  if (first + count > symbols_.size()) throw std::out_of_range("window slice out of range");
  return ObservationWindow(
      std::vector<Symbol>(symbols_.begin() + first, symbols_.begin() + first + count));
}

std::vector<double> likelihood_profile(const ModelSpec& spec, std::size_t i, std::size_t j,
                                       const ObservationWindow& window) {
  check_pair(spec, i, j);
  if (window.empty()) throw std::invalid_argument("empty observation window");
  const Kernel& pre = spec.pre_kernels[i];
  const Kernel& post = spec.post_kernels[j];
  const std::size_t T = window.transitions();

  bool tiny = false;
  for (std::size_t r = 1; r <= T; ++r) {
    for (double f : {pre(window[r - 1], window[r]), post(window[r - 1], window[r])}) {
      tiny = tiny || (f > 0.0 && f < kUnderflowGuard);
    }
  }

  // L_m = prefix_pre[T - m] * suffix_post[T - m]
  std::vector<double> out(T + 1);
  if (!tiny) {
    std::vector<double> prefix(T + 1, 1.0), suffix(T + 1, 1.0);
    for (std::size_t r = 1; r <= T; ++r) prefix[r] = prefix[r - 1] * pre(window[r - 1], window[r]);
    for (std::size_t r = T; r >= 1; --r) suffix[r - 1] = suffix[r] * post(window[r - 1], window[r]);
    for (std::size_t m = 0; m <= T; ++m) out[m] = prefix[T - m] * suffix[T - m];
    return out;
  }

  auto log_of = [](double f) {
    return f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
  };
  std::vector<double> prefix(T + 1, 0.0), suffix(T + 1, 0.0);
  for (std::size_t r = 1; r <= T; ++r) prefix[r] = prefix[r - 1] + log_of(pre(window[r - 1], window[r]));
  for (std::size_t r = T; r >= 1; --r) suffix[r - 1] = suffix[r] + log_of(post(window[r - 1], window[r]));
  for (std::size_t m = 0; m <= T; ++m) out[m] = std::exp(prefix[T - m] + suffix[T - m]);
  return out;
}

double likelihood_product(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t m,
                          const ObservationWindow& window) {
  if (window.empty() || m > window.transitions()) {
    throw std::out_of_range("likelihood_product: m exceeds the number of transitions");
  }
  return likelihood_profile(spec, i, j, window)[m];
}

std::vector<double> likelihood_ratios(const ModelSpec& spec, std::size_t i, std::size_t j,
                                      const ObservationWindow& window) {
  check_pair(spec, i, j);
  if (window.empty()) throw std::invalid_argument("empty observation window");
  const Kernel& pre = spec.pre_kernels[i];
  const Kernel& post = spec.post_kernels[j];
  const std::size_t T = window.transitions();
  std::vector<double> out(T + 1, 1.0);
  for (std::size_t m = 1; m <= T; ++m) {
    const Symbol from = window[T - m];
    const Symbol to = window[T - m + 1];
    const double f0 = pre(from, to);
    if (!(f0 > 0.0)) throw SupportError("observation outside common support (L_0 = 0)");
    out[m] = out[m - 1] * post(from, to) / f0;
  }
  return out;
}

PsiParts psi_parts(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                   const ObservationWindow& window, bool tilde) {
  check_length(window, l);
  const std::vector<double> L = likelihood_profile(spec, i, j, window);
  const double p = spec.p(i, j);
  const double q = spec.q(i, j);

  // Horner accumulation of the geometric mixture over change positions.
  double acc = 0.0;
  if (tilde) {
    for (std::size_t k = 1; k <= l; ++k) acc = acc * p + L[k];
  } else {
    for (std::size_t k = 0; k <= l; ++k) acc = acc * p + L[k + 1];
  }
  PsiParts parts;
  parts.change_mix = q * acc;
  parts.no_change = std::pow(p, double(tilde ? l : l + 1)) * L[0];
  parts.all_post = L[l + 1];
  return parts;
}

double psi(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
           const ObservationWindow& window, double alpha) {
  return psi_parts(spec, i, j, l, window, false).psi(alpha);
}

double psi_tilde(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                 const ObservationWindow& window, double alpha) {
  return psi_parts(spec, i, j, l, window, true).psi(alpha);
}

double lambda_fn(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                 const ObservationWindow& window, double alpha) {
  return psi_parts(spec, i, j, l, window, false).lambda(alpha);
}

double lambda_tilde_fn(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                       const ObservationWindow& window, double alpha) {
  return psi_parts(spec, i, j, l, window, true).lambda(alpha);
}

namespace {

double mixture(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
               const PairMatrix& gamma, const PairMatrix& delta, bool tilde) {
  check_mixture_args(spec, gamma, delta);
  check_length(window, k);
  double total = 0.0;
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      if (gamma(i, j) < 0.0) throw std::invalid_argument("mixture weights must be non-negative");
      if (gamma(i, j) == 0.0) continue;
      total += gamma(i, j) * psi_parts(spec, i, j, k, window, tilde).psi(delta(i, j));
    }
  }
  return total;
}

}  // namespace

double mixture_s(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
                 const PairMatrix& gamma, const PairMatrix& delta) {
  return mixture(spec, k, window, gamma, delta, false);
}

double mixture_s_tilde(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
                       const PairMatrix& gamma, const PairMatrix& delta) {
  return mixture(spec, k, window, gamma, delta, true);
}

double path_probability(const ModelSpec& spec, std::span<const Symbol> observations) {
  if (observations.size() < 2) throw std::invalid_argument("path must contain x0 and at least one observation");
  if (observations.front() != spec.x0) throw std::invalid_argument("path does not start at x0");
  for (Symbol s : observations) {
    if (s >= spec.alphabet_size) throw std::out_of_range("path symbol outside alphabet");
  }
  ObservationWindow window(std::vector<Symbol>(observations.begin(), observations.end()));
  return mixture_s_tilde(spec, observations.size() - 2, window, spec.b, spec.pi);
}

}  // namespace disorder
