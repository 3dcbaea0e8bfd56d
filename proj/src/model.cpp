#include "disorder/model.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "disorder/errors.hpp"

namespace disorder {

Kernel::Kernel(std::size_t alphabet_size, double fill)
    : size_(alphabet_size), values_(alphabet_size * alphabet_size, fill) {}

Kernel Kernel::from_rows(const std::vector<std::vector<double>>& rows) {
  Kernel out(rows.size());
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != rows.size()) {
      throw std::invalid_argument("kernel must be a square matrix");
    }
    for (std::size_t y = 0; y < rows.size(); ++y) out(x, y) = rows[x][y];
  }
  return out;
}

std::vector<std::vector<double>> Kernel::to_rows() const {
  std::vector<std::vector<double>> out(size_, std::vector<double>(size_));
  for (std::size_t x = 0; x < size_; ++x)
    for (std::size_t y = 0; y < size_; ++y) out[x][y] = (*this)(x, y);
  return out;
}

namespace {

void check_kernels(const ModelSpec& spec, const std::vector<Kernel>& kernels, const char* label,
                   std::vector<std::string>& out) {
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    const Kernel& kernel = kernels[k];
    if (kernel.alphabet_size() != spec.alphabet_size) {
      std::ostringstream msg;
      msg << label << "[" << k << "]: kernel dimension does not match alphabet_size";
      out.push_back(msg.str());
      continue;
    }
    for (Symbol x = 0; x < spec.alphabet_size; ++x) {
      double total = 0.0;
      bool bad_entry = false;
      for (double v : kernel.row(x)) {
        if (!std::isfinite(v) || v < 0.0) bad_entry = true;
        total += v;
      }
      if (bad_entry) {
        std::ostringstream msg;
        msg << label << "[" << k << "] row " << x << ": kernel entry negative or not finite";
        out.push_back(msg.str());
      }
      if (std::abs(total - 1.0) > kStochasticTolerance) {
        std::ostringstream msg;
        msg << label << "[" << k << "] row " << x << ": kernel row not stochastic (sum "
            << total << ")";
        out.push_back(msg.str());
      }
    }
  }
}

std::optional<Symbol> first_support_mismatch(const Kernel& a, const Kernel& b) {
  for (Symbol x = 0; x < a.alphabet_size(); ++x)
    for (Symbol y = 0; y < a.alphabet_size(); ++y)
      if ((a(x, y) > 0.0) != (b(x, y) > 0.0)) return x;
  return std::nullopt;
}

bool shape_ok(const ModelSpec& spec, const PairMatrix& m) {
  return m.rows() == spec.l0() && m.cols() == spec.l1();
}

}  // namespace

ValidationReport validate(const ModelSpec& spec) {
  ValidationReport report;
  auto& out = report.violations;

  if (spec.alphabet_size == 0) out.emplace_back("alphabet_size must be positive");
  if (spec.pre_kernels.empty()) out.emplace_back("at least one pre-change kernel required");
  if (spec.post_kernels.empty()) out.emplace_back("at least one post-change kernel required");
  if (spec.x0 >= spec.alphabet_size) out.emplace_back("x0 outside alphabet");

  check_kernels(spec, spec.pre_kernels, "pre_kernels", out);
  check_kernels(spec, spec.post_kernels, "post_kernels", out);

  bool shapes = true;
  for (auto [m, name] : {std::pair{&spec.b, "b"}, {&spec.pi, "pi"}, {&spec.p, "p"}}) {
    if (!shape_ok(spec, *m)) {
      out.push_back(std::string(name) + ": dimensions do not match l0 x l1");
      shapes = false;
      continue;
    }
    for (double v : m->values()) {
      if (!std::isfinite(v)) {
        out.push_back(std::string(name) + ": entry not finite");
        shapes = false;
        break;
      }
    }
  }

  if (shapes) {
    bool negative = false;
    for (double v : spec.b.values()) negative = negative || v < 0.0;
    if (negative) out.emplace_back("b: negative prior probability");
    if (std::abs(spec.b.sum() - 1.0) > kStochasticTolerance) {
      out.emplace_back("b: pair prior does not sum to 1");
    }
    for (double v : spec.pi.values()) {
      if (v < 0.0 || v > 1.0) {
        out.emplace_back("pi outside [0,1]");
        break;
      }
    }
    for (double v : spec.p.values()) {
      if (!(v > 0.0 && v < 1.0)) {
        out.emplace_back("p outside open interval (0,1)");
        break;
      }
    }
  }

  // Identical zero pattern across every kernel row that starts from the same x.
  bool dims = spec.alphabet_size > 0 && !spec.pre_kernels.empty();
  for (const auto* set : {&spec.pre_kernels, &spec.post_kernels})
    for (const Kernel& k : *set) dims = dims && k.alphabet_size() == spec.alphabet_size;
  if (dims) {
    const Kernel& ref = spec.pre_kernels.front();
    for (const auto* set : {&spec.pre_kernels, &spec.post_kernels}) {
      for (const Kernel& k : *set) {
        if (auto row = first_support_mismatch(ref, k)) {
          out.push_back("kernel supports differ at row " + std::to_string(*row));
        }
      }
    }
  }
  return report;
}

void require_valid(const ModelSpec& spec) {
  ValidationReport report = validate(spec);
  if (report.ok()) return;
  std::string msg = "invalid model:";
  for (const auto& v : report.violations) msg += "\n  " + v;
  throw ModelError(msg);
}

double theta_prior_pmf(const ModelSpec& spec, std::size_t k) {
  if (k == 0) throw std::invalid_argument("theta_prior_pmf: k must be >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < spec.l0(); ++i) {
    for (std::size_t j = 0; j < spec.l1(); ++j) {
      double cond = k == 1 ? spec.pi(i, j)
                           : (1.0 - spec.pi(i, j)) * std::pow(spec.p(i, j), double(k - 2)) *
                                 spec.q(i, j);
      total += cond * spec.b(i, j);
    }
  }
  return total;
}

double conditional_hazard(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t n,
                          std::size_t k) {
  if (i >= spec.l0() || j >= spec.l1()) throw std::out_of_range("conditional_hazard: pair index");
  if (k == 0) throw std::invalid_argument("conditional_hazard: k must be >= 1");
  const double p = spec.p(i, j);
  if (n > 0) return std::pow(p, double(k - 1)) * spec.q(i, j);
  if (k == 1) return spec.pi(i, j);
  return (1.0 - spec.pi(i, j)) * std::pow(p, double(k - 2)) * spec.q(i, j);
}

double conditional_survival(const ModelSpec& spec, std::size_t i, std::size_t j, std::size_t n,
                            std::size_t k) {
  if (i >= spec.l0() || j >= spec.l1()) {
    throw std::out_of_range("conditional_survival: pair index");
  }
  if (k == 0) throw std::invalid_argument("conditional_survival: k must be >= 1");
  const double p = spec.p(i, j);
  if (n > 0) return std::pow(p, double(k));
  return (1.0 - spec.pi(i, j)) * std::pow(p, double(k - 1));
}

}  // namespace disorder
