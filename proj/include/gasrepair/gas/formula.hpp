#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gasrepair {

using Rat = boost::rational<boost::multiprecision::cpp_int>;

// coeff * (product of vars) * (optional opaque factor). Vars form a sorted
// multiset, so n*n is {"n","n"}. The atom is a canonical token standing for a
// non-polynomial quantity (e.g. loop-dependent memory growth); identical
// tokens denote identical quantities.
struct Term {
    Rat coeff;
    std::vector<std::string> vars;
    std::optional<std::string> atom;
};

bool sameShape(const Term& a, const Term& b);

// Sum of terms in canonical form: shapes sorted and unique, no zero coeffs.
class GasFormula {
public:
    GasFormula() = default;
    explicit GasFormula(const Rat& constant);

    const std::vector<Term>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }
    bool isConstant() const;
    Rat constantValue() const; // throws unless isConstant()

    void add(Rat coeff, std::vector<std::string> vars = {},
             std::optional<std::string> atom = std::nullopt);
    GasFormula& operator+=(const GasFormula& o);

    friend GasFormula operator+(GasFormula a, const GasFormula& b) { return a += b; }
    friend bool operator==(const GasFormula& a, const GasFormula& b);

private:
    std::vector<Term> terms_;
};

GasFormula scale(const GasFormula& f, const Rat& k);
// Multiplies every term by one extra variable factor.
GasFormula scaleByVar(const GasFormula& f, const std::string& var);

// Variables and atom tokens are both looked up in the binding; a missing
// name throws std::out_of_range naming it.
Rat evaluate(const GasFormula& f, const std::map<std::string, Rat>& binding);

std::string formulaText(const GasFormula& f);

// Maps each distinct atom token to a fresh variable, stably across every
// formula converted with the same binding instance.
class SubstitutionBinding {
public:
    std::string freshFor(const std::string& atom);
    const std::map<std::string, std::string>& mapping() const { return atomVar_; }

private:
    std::map<std::string, std::string> atomVar_;
    size_t next_ = 0;
};

// Replaces every atom factor with its bound fresh variable; monomial terms
// pass through unchanged.
GasFormula toPolynomial(const GasFormula& f, SubstitutionBinding& binding);

enum class DominanceVerdict : uint8_t { AdominatesB, BdominatesA, NoDominance };

const char* verdictName(DominanceVerdict v);

// Lower gas dominates. Both formulas are first rewritten against one shared
// substitution binding. Differing term counts, or equal counts over different
// monomials, compare as NoDominance; equal formulas do too.
DominanceVerdict compareDominance(const GasFormula& a, const GasFormula& b);

// Non-dominated sorting: rank 1 is dominated by nobody, rank k only by
// earlier ranks. Mutually non-dominating formulas share a rank.
std::vector<size_t> dominanceLevels(const std::vector<GasFormula>& formulas);

} // namespace gasrepair
