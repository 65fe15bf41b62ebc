#include "gasrepair/gas/formula.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gasrepair {

namespace {

// Canonical order: higher degree first, then variable sequence, then atom.
bool shapeLess(const Term& a, const Term& b) {
    if (a.vars.size() != b.vars.size()) return a.vars.size() > b.vars.size();
    if (a.vars != b.vars) return a.vars < b.vars;
    bool ha = a.atom.has_value(), hb = b.atom.has_value();
    if (ha != hb) return !ha;
    if (!ha) return false;
    return *a.atom < *b.atom;
}

} // namespace

bool sameShape(const Term& a, const Term& b) { return a.vars == b.vars && a.atom == b.atom; }

GasFormula::GasFormula(const Rat& constant) {
    if (constant != Rat(0)) terms_.push_back({constant, {}, std::nullopt});
}

bool GasFormula::isConstant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].vars.empty() && !terms_[0].atom);
}

Rat GasFormula::constantValue() const {
    if (!isConstant()) throw std::logic_error("formula is not constant: " + formulaText(*this));
    return terms_.empty() ? Rat(0) : terms_[0].coeff;
}

void GasFormula::add(Rat coeff, std::vector<std::string> vars, std::optional<std::string> atom) {
    if (coeff == Rat(0)) return;
    std::sort(vars.begin(), vars.end());
    Term probe{std::move(coeff), std::move(vars), std::move(atom)};
    auto it = std::lower_bound(terms_.begin(), terms_.end(), probe, shapeLess);
    if (it != terms_.end() && sameShape(*it, probe)) {
        it->coeff += probe.coeff;
        if (it->coeff == Rat(0)) terms_.erase(it);
        return;
    }
    terms_.insert(it, std::move(probe));
}

GasFormula& GasFormula::operator+=(const GasFormula& o) {
    for (const Term& t : o.terms_) add(t.coeff, t.vars, t.atom);
    return *this;
}

bool operator==(const GasFormula& a, const GasFormula& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i)
        if (!sameShape(a.terms_[i], b.terms_[i]) || a.terms_[i].coeff != b.terms_[i].coeff)
            return false;
    return true;
}

GasFormula scale(const GasFormula& f, const Rat& k) {
    GasFormula out;
    for (const Term& t : f.terms()) out.add(t.coeff * k, t.vars, t.atom);
    return out;
}

GasFormula scaleByVar(const GasFormula& f, const std::string& var) {
    GasFormula out;
    for (const Term& t : f.terms()) {
        std::vector<std::string> vars = t.vars;
        vars.push_back(var);
        out.add(t.coeff, std::move(vars), t.atom);
    }
    return out;
}

Rat evaluate(const GasFormula& f, const std::map<std::string, Rat>& binding) {
    auto lookup = [&](const std::string& name) -> Rat {
        auto it = binding.find(name);
        if (it == binding.end()) throw std::out_of_range("no binding for '" + name + "'");
        return it->second;
    };
    Rat sum(0);
    for (const Term& t : f.terms()) {
        Rat v = t.coeff;
        for (const std::string& var : t.vars) v *= lookup(var);
        if (t.atom) v *= lookup(*t.atom);
        sum += v;
    }
    return sum;
}

namespace {

std::string ratText(const Rat& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

} // namespace

std::string formulaText(const GasFormula& f) {
    if (f.terms().empty()) return "0";
    std::string out;
    for (const Term& t : f.terms()) {
        if (!out.empty()) out += " + ";
        std::vector<std::string> factors = t.vars;
        if (t.atom) factors.push_back(*t.atom);
        if (factors.empty() || t.coeff != Rat(1)) out += ratText(t.coeff);
        for (size_t i = 0; i < factors.size(); ++i) {
            if (i > 0 || t.coeff != Rat(1)) out += "*";
            out += factors[i];
        }
    }
    return out;
}

std::string SubstitutionBinding::freshFor(const std::string& atom) {
    auto it = atomVar_.find(atom);
    if (it != atomVar_.end()) return it->second;
    std::string var = "$" + std::to_string(++next_);
    atomVar_.emplace(atom, var);
    return var;
}

GasFormula toPolynomial(const GasFormula& f, SubstitutionBinding& binding) {
    GasFormula out;
    for (const Term& t : f.terms()) {
        if (!t.atom) {
            out.add(t.coeff, t.vars);
            continue;
        }
        std::vector<std::string> vars = t.vars;
        vars.push_back(binding.freshFor(*t.atom));
        out.add(t.coeff, std::move(vars));
    }
    return out;
}

const char* verdictName(DominanceVerdict v) {
    switch (v) {
        case DominanceVerdict::AdominatesB: return "AdominatesB";
        case DominanceVerdict::BdominatesA: return "BdominatesA";
        case DominanceVerdict::NoDominance: return "NoDominance";
    }
    return "NoDominance";
}

DominanceVerdict compareDominance(const GasFormula& a, const GasFormula& b) {
    SubstitutionBinding binding;
    GasFormula pa = toPolynomial(a, binding);
    GasFormula pb = toPolynomial(b, binding);
    const auto& ta = pa.terms();
    const auto& tb = pb.terms();
    if (ta.size() != tb.size()) return DominanceVerdict::NoDominance;
    bool aLe = true, bLe = true, equal = true;
    for (size_t i = 0; i < ta.size(); ++i) {
        if (ta[i].vars != tb[i].vars) return DominanceVerdict::NoDominance;
        if (ta[i].coeff != tb[i].coeff) equal = false;
        if (ta[i].coeff > tb[i].coeff) aLe = false;
        if (tb[i].coeff > ta[i].coeff) bLe = false;
    }
    if (equal) return DominanceVerdict::NoDominance;
    if (aLe) return DominanceVerdict::AdominatesB;
    if (bLe) return DominanceVerdict::BdominatesA;
    return DominanceVerdict::NoDominance;
}

std::vector<size_t> dominanceLevels(const std::vector<GasFormula>& formulas) {
    size_t n = formulas.size();
    std::vector<size_t> level(n, 0);
    size_t assigned = 0, rank = 0;
    while (assigned < n) {
        ++rank;
        std::vector<size_t> front;
        for (size_t i = 0; i < n; ++i) {
            if (level[i] != 0) continue;
            bool dominated = false;
            for (size_t j = 0; j < n && !dominated; ++j) {
                if (j == i || level[j] != 0) continue;
                dominated = compareDominance(formulas[j], formulas[i]) ==
                            DominanceVerdict::AdominatesB;
            }
            if (!dominated) front.push_back(i);
        }
        for (size_t i : front) level[i] = rank;
        assigned += front.size();
    }
    return level;
}

} // namespace gasrepair
