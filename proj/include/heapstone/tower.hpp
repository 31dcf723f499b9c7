#pragma once

#include "heapstone/em.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace heapstone {

/// Thrown when a continuously checked invariant fails.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Process-wide counters of validator checks and violations, by kind:
/// "membership", "deltaM", "M-zero", "triangle", "k-cocycle".
class Validators {
public:
    static Validators& instance();
    /// Counts the check; throws InvariantViolation when !ok.
    void check(const std::string& kind, bool ok, const std::string& detail = {});
    std::size_t checks(const std::string& kind) const;
    std::size_t violations(const std::string& kind) const;
    std::size_t total_violations() const;
    std::map<std::string, std::pair<std::size_t, std::size_t>> snapshot() const;
    void reset();

private:
    mutable std::mutex m_;
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts_;
};

/// What a k-invariant expression is evaluated against: a finite space S, the
/// pullback of base cochains along S -> B, and fibre coordinates on S.
struct KContext {
    const FiniteSSet& space;
    std::function<Cochain(const Cochain&)> pull_base;
    const std::vector<Cochain>& coords;
};

/// Natural cochain-valued expression in the base map and the earlier fibre
/// coordinates. Typed by degree and coefficient group at construction.
class KExpr {
public:
    enum class Op { Zero, Fib, Base, Coboundary, Hom, CupI, Add, Neg, Scale };

    static KExpr zero(int degree, FGAbelianGroup pi);
    /// Fibre coordinate of stage `level` (1-based), of the given type.
    static KExpr fib(int level, int degree, FGAbelianGroup pi);
    static KExpr base(Cochain on_base);
    static KExpr coboundary(const KExpr& e);
    static KExpr hom(GroupHom h, const KExpr& e);
    /// Reduction Z -> Z/m (m > 1) of an integral expression.
    static KExpr mod(const Integer& m, const KExpr& e);
    static KExpr cup(const KExpr& a, const KExpr& b);
    static KExpr cup_i(int i, const KExpr& a, const KExpr& b);
    static KExpr add(const KExpr& a, const KExpr& b);
    static KExpr neg(const KExpr& e);
    static KExpr scale(const Integer& k, const KExpr& e);

    Op op() const { return n_->op; }
    int degree() const { return n_->degree; }
    const FGAbelianGroup& group() const { return n_->group; }
    /// Subexpressions, the fibre level or the i of cup_i, and the scalar or
    /// homomorphism of Scale / Neg / Hom nodes.
    std::size_t arity() const { return n_->args.size(); }
    KExpr arg(std::size_t i) const { return KExpr(n_->args.at(i)); }
    int index() const { return n_->index; }
    const Integer& scalar() const { return n_->scalar; }
    const GroupHom& hom() const { return n_->hom; }
    /// Largest fibre level referenced (0 if none).
    int max_level() const;
    Cochain evaluate(const KContext& ctx) const;
    std::string to_string() const;

private:
    struct Node {
        Op op;
        int degree = 0;
        FGAbelianGroup group;
        int index = 0;  // fib level or the i of cup_i
        Integer scalar;
        Cochain cochain;
        GroupHom hom;
        std::vector<std::shared_ptr<const Node>> args;
    };
    explicit KExpr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    static Cochain eval(const Node& n, const KContext& ctx);
    static std::string show(const Node& n);
    std::shared_ptr<const Node> n_;
};

/// Same values, viewed with coefficients in a group of identical presentation.
Cochain relabel(const Cochain& c, const FGAbelianGroup& pi);
bool same_presentation(const FGAbelianGroup& a, const FGAbelianGroup& b);

struct StageSpec {
    int n;  // degree of the fibre K(pi, n)
    FGAbelianGroup pi;
    KExpr k;  // degree n + 1, coefficients pi
};

/// Moore–Postnikov tower over a finite base, given stage by stage. Level j
/// (1-based) is the pullback of E(pi_j, n_j) -> K(pi_j, n_j + 1) along k_j.
class Tower {
public:
    Tower(FiniteSSet base, std::vector<StageSpec> stages);
    const FiniteSSet& base() const { return base_; }
    int height() const { return static_cast<int>(stages_.size()); }
    const StageSpec& stage(int level) const { return stages_.at(level - 1); }
    /// Declared connectivity of the fibre: first stage degree minus one.
    int connectivity() const;
    Tower truncated(int levels) const;
    /// Random spot checks that every k_j takes cocycle values.
    void spot_check(std::mt19937& rng, int samples = 4) const;

private:
    FiniteSSet base_;
    std::vector<StageSpec> stages_;
};

/// A map S -> P_level over B: the base map g and cocycle data c_1..c_level
/// with δc_j = k_j(g, c_<j).
struct StageMap {
    SimplicialMap base;
    std::vector<Cochain> coords;

    const FiniteSSet& space() const { return base.source(); }
    int level() const { return static_cast<int>(coords.size()); }
    StageMap truncated(int level) const;
};

/// A q-simplex of P_level: a base simplex b and cochains on Δ^q.
struct StageSimplex {
    Simplex base;
    std::vector<Cochain> coords;
    int dim() const { return base.dim; }
};

Cochain evaluate_k(const Tower& t, int level, const StageMap& f);
Cochain evaluate_k(const Tower& t, int level, const StageSimplex& s);
/// δc_j = k_j for all levels (records "membership").
bool is_member(const Tower& t, const StageMap& f);
bool is_member(const Tower& t, const StageSimplex& s);
void validate_member(const Tower& t, const StageMap& f, const std::string& where);
void validate_member(const Tower& t, const StageSimplex& s, const std::string& where);

StageSimplex simplex_of(const StageMap& f, const Simplex& sigma);
/// f ∘ h for h : S' -> S.
StageMap precompose(const StageMap& f, const SimplicialMap& h);
StageMap base_only(const SimplicialMap& g);

/// P_level as a locally effective simplicial set.
class StageSet : public LocallyEffectiveSet<StageSimplex> {
public:
    StageSet(const Tower& t, int level) : t_(t), level_(level) {}
    int dimension_of(const StageSimplex& s) const override { return s.dim(); }
    StageSimplex face(const StageSimplex& s, int i) const override;
    StageSimplex degeneracy(const StageSimplex& s, int j) const override;
    bool equal(const StageSimplex& a, const StageSimplex& b) const override;
    /// A random q-simplex over a random simplex of B.
    StageSimplex random(int q, std::mt19937& rng) const;
    /// Random q-simplex over the given base simplex.
    StageSimplex random_over(const Simplex& b, std::mt19937& rng) const;

private:
    const Tower& t_;
    int level_;
};

/// (x, c) · z = (x, c + z) on the top coordinate; z a cocycle on Δ^q.
StageSimplex principal_action(const StageSimplex& s, const EMSimplex& z);
StageMap principal_action(const StageMap& f, const Cochain& z);

struct StabilityReport {
    int relative_dim;  // dim(X \ A), -1 when A = X
    int connectivity;
    bool stable;
    std::string message() const;
};
StabilityReport check_stability(const Subcomplex& a, const Tower& t);

struct LiftResult {
    std::optional<StageMap> lift;
    /// Class of the obstruction in H^{n+1}(X, A; pi) when no lift exists.
    std::optional<GroupElement> obstruction;
};

/// Extends base_lift : X -> P_{j-1} to X -> P_j with top coordinate equal to
/// `on_a` on A (values of on_a off A are ignored). pair describes (X, A).
LiftResult lift_map(const RelativeComplex& pair, const Tower& t, const StageMap& base_lift, const Cochain& on_a);
/// Same with top coordinate zero on A.
LiftResult lift_map(const RelativeComplex& pair, const Tower& t, const StageMap& base_lift);

/// Lift of a homotopy h : Δ¹×X -> P_{j-1}; the pair is
/// (Δ¹×X, 0×X ∪ Δ¹×A) and `fixed` carries the top coordinate there.
/// Always exists; throws InvariantViolation if the solve fails.
StageMap lift_homotopy(const RelativeComplex& pair, const Tower& t, const StageMap& h, const Cochain& fixed);

/// z with l2 = l1 + z: requires equal lower data; z vanishes on A.
Cochain unique_difference(const Subcomplex& a, const StageMap& l1, const StageMap& l2);

/// Zero outside A: the relative part of c removed.
Cochain mask_to(const Cochain& c, const Subcomplex& a);

}  // namespace heapstone
