#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "disorder/model.hpp"
#include "disorder/pair_matrix.hpp"

namespace disorder {

/// An ordered run of consecutive observations (x_k, ..., x_n).
///
/// Windows are immutable values; shifting or slicing returns a copy. The
/// likelihood functions below index a window positionally, so a window taken
/// from the middle of a stream behaves exactly like one starting at time 0.
class ObservationWindow {
 public:
  ObservationWindow() = default;
  explicit ObservationWindow(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
  ObservationWindow(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t k) const { return symbols_[k]; }
  Symbol back() const { return symbols_.back(); }
  std::span<const Symbol> symbols() const { return symbols_; }

  /// Number of transitions covered, i.e. size() - 1.
  std::size_t transitions() const { return symbols_.empty() ? 0 : symbols_.size() - 1; }

  /// Drops the oldest symbol and appends `next`.
  ObservationWindow shifted(Symbol next) const;
  /// Appends `next`, keeping at most `max_length` most recent symbols.
  ObservationWindow appended(Symbol next, std::size_t max_length) const;
  /// Symbols [first, first + count).
  ObservationWindow slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const ObservationWindow&, const ObservationWindow&) = default;

 private:
  std::vector<Symbol> symbols_;
};

/// L_m over the window: pre-change kernel i on all but the last m
/// transitions, post-change kernel j on the last m. Requires m <= transitions.
double likelihood_product(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t m,
                          const ObservationWindow& window);

/// All of L_0 .. L_T for a window with T transitions, in O(T).
std::vector<double> likelihood_profile(const ModelSpec& spec, std::size_t i, std::size_t j,
                                       const ObservationWindow& window);

/// Ratios L_m / L_0 for m = 0 .. T. Throws SupportError when L_0 vanishes.
std::vector<double> likelihood_ratios(const ModelSpec& spec, std::size_t i, std::size_t j,
                                      const ObservationWindow& window);

/// Decomposition shared by the Psi family on a window of length l + 2:
///   Psi(alpha) = (1 - alpha) * (change_mix + no_change) + alpha * all_post
///   Lambda(alpha) = Psi(alpha) - (1 - alpha) * no_change
/// For the untilded functions change_mix = q * sum_{k=0..l} p^{l-k} L_{k+1}
/// and no_change = p^{l+1} L_0; the tilded variants use
/// q * sum_{k=1..l} p^{l-k} L_k and p^l L_0.
struct PsiParts {
  double change_mix = 0.0;
  double no_change = 0.0;
  double all_post = 0.0;

  double psi(double alpha) const { return (1.0 - alpha) * (change_mix + no_change) + alpha * all_post; }
  double lambda(double alpha) const { return (1.0 - alpha) * change_mix + alpha * all_post; }
};

PsiParts psi_parts(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                   const ObservationWindow& window, bool tilde);

double psi(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
           const ObservationWindow& window, double alpha);
double psi_tilde(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                 const ObservationWindow& window, double alpha);
double lambda_fn(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                 const ObservationWindow& window, double alpha);
double lambda_tilde_fn(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t l,
                       const ObservationWindow& window, double alpha);

/// sum_ij gamma_ij * Psi^{ij}(k, window, delta_ij), and the tilded analogue.
double mixture_s(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
                 const PairMatrix& gamma, const PairMatrix& delta);
double mixture_s_tilde(const ModelSpec& spec, std::size_t k, const ObservationWindow& window,
                       const PairMatrix& gamma, const PairMatrix& delta);

/// P(X_1 = x_1, ..., X_n = x_n | X_0 = x0) for observations = (x0, x_1, ..., x_n), n >= 1.
double path_probability(const ModelSpec& spec, std::span<const Symbol> observations);

}  // namespace disorder
