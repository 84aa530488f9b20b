#include "displab/diffpoly.hpp"

#include <algorithm>
#include <map>

namespace displab::diffpoly {

namespace {

bool canonical_less(const DiffMonomial& a, const DiffMonomial& b) {
  if (a.eps_power != b.eps_power) return a.eps_power < b.eps_power;
  return a.factors < b.factors;
}

std::vector<int> descending(const std::vector<int>& f) {
  std::vector<int> d(f);
  std::sort(d.begin(), d.end(), std::greater<int>());
  return d;
}

// Ordering used to pick the term to strip during antidifferentiation:
// compare factor multisets from the highest derivative down.
bool strip_leads(const DiffMonomial& a, const DiffMonomial& b) {
  return descending(a.factors) < descending(b.factors);
}

void check_monomial(const DiffMonomial& m) {
  if (m.eps_power < 0 || m.eps_power % 2 != 0)
    throw validation_error("diffpoly: eps_power must be even and non-negative");
  for (int j : m.factors)
    if (j < 0) throw validation_error("diffpoly: derivative orders must be non-negative");
}

}  // namespace

DiffPoly::DiffPoly(std::vector<DiffMonomial> terms) : terms_(std::move(terms)) { normalize(); }

void DiffPoly::normalize() {
  for (auto& m : terms_) {
    check_monomial(m);
    std::sort(m.factors.begin(), m.factors.end());
  }
  std::sort(terms_.begin(), terms_.end(), canonical_less);
  std::vector<DiffMonomial> merged;
  for (auto& m : terms_) {
    if (!merged.empty() && merged.back().eps_power == m.eps_power &&
        merged.back().factors == m.factors) {
      merged.back().coeff += m.coeff;
    } else {
      merged.push_back(std::move(m));
    }
  }
  std::erase_if(merged, [](const DiffMonomial& m) { return m.coeff == 0; });
  terms_ = std::move(merged);
}

DiffPoly DiffPoly::monomial(Rational coeff, int eps_power, std::vector<int> factors) {
  return DiffPoly({DiffMonomial{std::move(coeff), eps_power, std::move(factors)}});
}

DiffPoly DiffPoly::from_terms(std::vector<DiffMonomial> terms) { return DiffPoly(std::move(terms)); }

DiffPoly DiffPoly::operator+(const DiffPoly& o) const {
  std::vector<DiffMonomial> all(terms_);
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return DiffPoly(std::move(all));
}

DiffPoly DiffPoly::operator-(const DiffPoly& o) const { return *this + o.scaled(-1); }

DiffPoly DiffPoly::scaled(const Rational& c) const {
  std::vector<DiffMonomial> t(terms_);
  for (auto& m : t) m.coeff *= c;
  return DiffPoly(std::move(t));
}

DiffPoly DiffPoly::times_factor(int order) const {
  std::vector<DiffMonomial> t(terms_);
  for (auto& m : t) m.factors.push_back(order);
  return DiffPoly(std::move(t));
}

DiffPoly DiffPoly::times_eps(int power) const {
  std::vector<DiffMonomial> t(terms_);
  for (auto& m : t) m.eps_power += power;
  return DiffPoly(std::move(t));
}

DiffPoly total_x_derivative(const DiffPoly& p) {
  std::vector<DiffMonomial> out;
  for (const auto& m : p.terms()) {
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
      DiffMonomial d = m;
      d.factors[i] += 1;
      out.push_back(std::move(d));
    }
  }
  return DiffPoly::from_terms(std::move(out));
}

DiffPoly lenard_apply(const DiffPoly& p) {
  const DiffPoly dp = total_x_derivative(p);
  const DiffPoly d3p = total_x_derivative(total_x_derivative(dp));
  return d3p.times_eps(2) + dp.times_factor(0).scaled(4) + p.times_factor(1).scaled(2);
}

DiffPoly formal_antiderivative(const DiffPoly& p) {
  std::map<int, std::vector<DiffMonomial>> grades;
  for (const auto& m : p.terms()) grades[m.eps_power].push_back(m);

  DiffPoly q;
  for (auto& [eps, terms] : grades) {
    DiffPoly g = DiffPoly::from_terms(std::move(terms));
    int guard = 0;
    while (!g.is_zero()) {
      if (++guard > 100000)
        throw numerical_error("formal_antiderivative: stripping failed to terminate");
      const auto& lead = *std::max_element(g.terms().begin(), g.terms().end(), strip_leads);
      if (lead.factors.empty())
        throw not_exact_error("formal_antiderivative: constant term has no antiderivative");
      const int j1 = *std::max_element(lead.factors.begin(), lead.factors.end());
      if (j1 == 0)
        throw not_exact_error("formal_antiderivative: pure power of u is not a total derivative");
      if (std::count(lead.factors.begin(), lead.factors.end(), j1) > 1)
        throw not_exact_error(
            "formal_antiderivative: repeated top derivative in the leading term (not exact)");
      std::vector<int> cand = lead.factors;
      *std::find(cand.begin(), cand.end(), j1) = j1 - 1;
      const auto mult = std::count(cand.begin(), cand.end(), j1 - 1);
      const DiffPoly piece =
          DiffPoly::monomial(lead.coeff / Rational(mult), lead.eps_power, std::move(cand));
      q = q + piece;
      g = g - total_x_derivative(piece);
    }
  }
  return q;
}

DiffPoly lenard(int m) {
  if (m < 0 || m > 6) throw validation_error("lenard: m must lie in 0..6");
  DiffPoly L = DiffPoly::u();
  for (int i = 1; i <= m; ++i) L = formal_antiderivative(lenard_apply(L));
  return L;
}

DiffPoly hierarchy_flow(int m) {
  if (m < 1 || m > 6) throw validation_error("hierarchy_flow: m must lie in 1..6");
  const DiffPoly f = total_x_derivative(lenard(m));
  return (m % 2 != 0) ? f.scaled(-1) : f;
}

namespace {
std::string factor_name(int j) {
  if (j == 0) return "u";
  if (j == 1) return "u_x";
  return "u_{" + std::to_string(j) + "x}";
}
}  // namespace

std::string to_text(const DiffPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& m : p.terms()) {
    const bool negative = m.coeff < 0;
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    Rational c = negative ? Rational(-m.coeff) : m.coeff;
    out += c.str();
    if (m.eps_power > 0) out += " * eps^" + std::to_string(m.eps_power);
    for (int j : m.factors) out += " * " + factor_name(j);
  }
  return out;
}

CompiledPoly compile_evaluator(const DiffPoly& p) {
  CompiledPoly c;
  for (const auto& m : p.terms()) {
    CompiledPoly::Term t;
    t.coeff = m.coeff.convert_to<double>();
    t.eps_power = m.eps_power;
    t.factors = m.factors;
    c.terms.push_back(std::move(t));
    for (int j : m.factors)
      if (std::find(c.required_orders.begin(), c.required_orders.end(), j) ==
          c.required_orders.end())
        c.required_orders.push_back(j);
  }
  std::sort(c.required_orders.begin(), c.required_orders.end());
  return c;
}

}  // namespace displab::diffpoly
