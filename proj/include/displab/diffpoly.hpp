#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "displab/errors.hpp"

namespace displab::diffpoly {

using Rational = boost::multiprecision::cpp_rational;

/// coeff * eps^eps_power * prod_j u_{(j)x}, with factor order 0 meaning u
/// itself.  factors is kept sorted ascending; eps_power is even and >= 0.
struct DiffMonomial {
  Rational coeff;
  int eps_power = 0;
  std::vector<int> factors;

  bool operator==(const DiffMonomial&) const = default;
};

/// Exact-coefficient polynomial in u and its x-derivatives over Q[eps^2],
/// kept in a canonical sorted form (so equality is structural).
class DiffPoly {
 public:
  DiffPoly() = default;

  static DiffPoly monomial(Rational coeff, int eps_power, std::vector<int> factors);
  static DiffPoly from_terms(std::vector<DiffMonomial> terms);
  static DiffPoly u() { return monomial(1, 0, {0}); }

  bool is_zero() const { return terms_.empty(); }
  const std::vector<DiffMonomial>& terms() const { return terms_; }

  DiffPoly operator+(const DiffPoly& o) const;
  DiffPoly operator-(const DiffPoly& o) const;
  DiffPoly scaled(const Rational& c) const;
  /// Multiply every term by u_{(order)x}.
  DiffPoly times_factor(int order) const;
  /// Multiply every term by eps^power (power even, >= 0).
  DiffPoly times_eps(int power) const;

  bool operator==(const DiffPoly&) const = default;

 private:
  explicit DiffPoly(std::vector<DiffMonomial> terms);
  void normalize();

  std::vector<DiffMonomial> terms_;
};

/// Total derivative d/dx by the product rule (each factor order raised once).
DiffPoly total_x_derivative(const DiffPoly& p);

/// One application of the recursion operator:
///   eps^2 (d/dx)^3 p + 4 u (d/dx) p + 2 u_x p.
DiffPoly lenard_apply(const DiffPoly& p);

/// q with dq/dx = p, found by repeatedly stripping the leading term.  Throws
/// not_exact_error when p is not a total derivative (e.g. u_x^2 or u^k).
DiffPoly formal_antiderivative(const DiffPoly& p);

/// m-th iterate of the recursion: L_0 = u, dL_m/dx = lenard_apply(L_{m-1}).
/// Supported for 0 <= m <= 6.
DiffPoly lenard(int m);

/// Right-hand side of the m-th commuting flow u_t = (-1)^m d/dx L_m;
/// m = 1 is u_t = -6 u u_x - eps^2 u_xxx.  Supported for 1 <= m <= 6.
DiffPoly hierarchy_flow(int m);

/// Canonical text rendering: terms joined by signs, each
/// "<coeff> * eps^<k> * u_{jx} * ...".
std::string to_text(const DiffPoly& p);

/// Double-precision evaluator for a fixed polynomial.  provider(j) must
/// return the grid samples of the j-th x-derivative (j = 0 the field itself).
struct CompiledPoly {
  struct Term {
    double coeff;
    int eps_power;
    std::vector<int> factors;
  };
  std::vector<Term> terms;
  std::vector<int> required_orders;

  template <class T, class Provider>
  std::vector<T> evaluate(Provider&& provider, double eps, std::size_t n) const {
    std::vector<T> out(n, T{});
    for (const auto& t : terms) {
      const double c = t.coeff * std::pow(eps, t.eps_power);
      std::vector<const std::vector<T>*> arrs;
      arrs.reserve(t.factors.size());
      for (int j : t.factors) arrs.push_back(&provider(j));
      for (std::size_t i = 0; i < n; ++i) {
        T prod = static_cast<T>(c);
        for (const auto* a : arrs) prod *= (*a)[i];
        out[i] += prod;
      }
    }
    return out;
  }
};

CompiledPoly compile_evaluator(const DiffPoly& p);

}  // namespace displab::diffpoly
