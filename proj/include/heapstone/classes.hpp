#pragma once

#include "heapstone/heap.hpp"
#include "heapstone/malcev.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace heapstone {

struct CylinderContext;

/// Δ¹×W together with C ⊆ W, for pairs (Δ¹×W, ∂Δ¹×W ∪ Δ¹×C).
struct CylinderShape {
    ProductSSet prism;
    Subcomplex base_sub;  // C ⊆ W
};
class Delta3Malcev;
enum class MalcevKind { Lambda, Delta3 };

/// A finite pair (X, A) with its reduced relative cochain complex. Pairs of
/// the form (Δ¹×W, ∂Δ¹×W ∪ Δ¹×C) remember that shape.
class PairContext : public std::enable_shared_from_this<PairContext> {
public:
    static std::shared_ptr<PairContext> make(FiniteSSet x, Subcomplex a);

    const FiniteSSet& space() const { return x_; }
    const Subcomplex& subcomplex() const { return a_; }
    const RelativeComplex& complex() const { return *rc_; }
    /// Δ¹×X with its end and side subcomplexes; built once.
    const CylinderContext& cylinder();
    /// Set for pairs of cylinder shape.
    const CylinderShape* shape() const { return shape_.get(); }
    /// Class operation on this pair, built once per structure and kind.
    /// Delta3 needs a pair of cylinder shape.
    ClassOperation& operation(WeakMalcev& w, MalcevKind kind);

private:
    PairContext(FiniteSSet x, Subcomplex a);
    FiniteSSet x_;
    Subcomplex a_;
    std::unique_ptr<RelativeComplex> rc_;
    std::unique_ptr<CylinderContext> cyl_;
    std::shared_ptr<const CylinderShape> shape_;
    std::map<std::pair<const WeakMalcev*, MalcevKind>, std::unique_ptr<ClassOperation>> ops_;
    std::mutex m_;
};

struct CylinderContext {
    ProductSSet prism;  // Δ¹ × X
    SimplicialMap pr;   // Δ¹×X -> X
    SimplicialMap i0, i1;
    Subcomplex end0, end1, side;  // 0×X, 1×X, Δ¹×A
    /// (Δ¹×X, ∂Δ¹×X ∪ Δ¹×A): homotopies rel both ends.
    std::shared_ptr<PairContext> rel_ends;
    /// (Δ¹×X, 0×X ∪ Δ¹×A): homotopies from a given start.
    std::shared_ptr<PairContext> from_start;
};

/// Cochain on x taking, on each cell, the value of the first part whose
/// subcomplex contains it; cells in no part get 0. Parts must agree on
/// overlaps.
Cochain glue(const FiniteSSet& x, int degree, const FGAbelianGroup& pi,
             const std::vector<std::pair<const Subcomplex*, Cochain>>& parts);

/// [X, P_top]^A_B with X, A from the pair, base map g and the A-data: a
/// full-level map on X whose values matter on A only.
struct LiftingProblem {
    std::shared_ptr<PairContext> pair;
    SimplicialMap g;
    StageMap a_data;
};
LiftingProblem make_problem(std::shared_ptr<PairContext> pair, const SimplicialMap& g, const Tower& t,
                            std::optional<StageMap> a_data = std::nullopt);

class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(StabilityReport r) : std::runtime_error(r.message()), report(r) {}
    StabilityReport report;
};

/// The Δ³ operation on classes of cylinder-shaped problems: ℓ1, ℓ0, ℓ2 on
/// e02, e12, e13, lifted over Δ³×W and restricted to e03.
class Delta3Malcev : public ClassOperation {
public:
    Delta3Malcev(const Tower& t, PairContext& pair);
    StageMap operator()(const StageMap& l1, const StageMap& l0, const StageMap& l2) override;

private:
    const Tower& t_;
    PairContext& pair_;
    std::shared_ptr<const CylinderShape> shape_;
    ProductSSet big_;  // Δ³ × W
    Subcomplex e02_, e12_, e13_, side_, t_sub_;
    std::unique_ptr<RelativeComplex> rc_;
    SimplicialMap q_, restrict_;  // Δ³×W -> Δ¹×W, Δ¹×W -> Δ³×W along e03
};

struct EngineOptions {
    bool generators_only = false;
    MalcevKind malcev = MalcevKind::Lambda;
};

struct StageResult {
    int level = 0;
    bool empty = false;
    /// Set when this stage is where the obstruction appeared.
    std::optional<GroupElement> obstruction;
    /// G_j; the heap is all of G_j. reps[0] represents 0, reps[i+1] the
    /// i-th generator.
    FGAbelianGroup group;
    std::vector<StageMap> reps;
    /// Coefficients t with Σ t_i k_*(x_i) = 0 over the previous reps.
    IntVector t;
    // full mode only
    GroupElement g_star;               // class of the base lift's projection
    std::optional<Subgroup> kernel;    // K ⊆ G_{j-1}
    std::shared_ptr<const RelativeComplex::Cohomology> fiber;  // H^n(X, A; π)
    std::vector<IntVector> stabilizer;  // im ∂ in fiber coordinates
};

/// Stage induction for one lifting problem.
class Engine {
public:
    Engine(const Tower& t, WeakMalcev& w, LiftingProblem p, int top, EngineOptions o = {});

    const StageResult& stage(int level);
    int top() const { return top_; }
    const LiftingProblem& problem() const { return p_; }
    const Tower& tower() const { return t_; }
    /// Map representing an element of G_level.
    StageMap representative(int level, const GroupElement& g);
    /// Element of G_level for a map agreeing with the A-data (full mode).
    GroupElement classify(int level, const StageMap& l);
    /// Homotopy Δ¹×X -> P_level rel A from a to b, if one exists.
    std::optional<StageMap> find_homotopy(int level, const StageMap& a, const StageMap& b);
    /// Lift of h : Δ¹×X -> P_{level-1} starting at `start` (level maps).
    StageMap lift_from(const StageMap& h, const StageMap& start);
    ClassOperation& op();

private:
    void compute(int level);
    StageMap lift_or_throw(const StageMap& below, int level, const char* what);
    /// Sub-problem on (Δ¹×X, ∂Δ¹×X ∪ Δ¹×A) with ends a and b.
    LiftingProblem path_problem(int level, const StageMap& a, const StageMap& b);
    /// Σ u_i λ_i over ℓ_0 at the given level (u in kernel coordinates).
    StageMap kernel_combination(int level, const IntVector& u);

    const Tower& t_;
    WeakMalcev& w_;
    LiftingProblem p_;
    int top_;
    EngineOptions o_;
    std::map<int, StageResult> stages_;
    std::optional<StageMap> a_pr_;
};

struct Certificate {
    bool nonempty = true;
    /// Degree n of the stage where lifting failed, and the obstruction.
    int stage_degree = 0;
    std::optional<GroupElement> obstruction;
    /// Per stage, the coefficients t of the lift.
    std::vector<IntVector> coefficients;
    std::string to_string() const;
};

struct ClassSet {
    int level = 0;
    int suspension_level = 0;
    AbelianHeap heap = AbelianHeap::empty();
    std::vector<StageMap> reps;
    Certificate certificate;
};

/// [X, L_n]^A = H^n(X, A; π) with cocycle representatives.
struct CohomologyClasses {
    AbelianHeap heap = AbelianHeap::empty();
    std::vector<Cochain> reps;
};
CohomologyClasses classes_into_L(const RelativeComplex& pair, const FGAbelianGroup& pi, int n);

/// Throws StabilityError outside the stable range.
void require_stable(const LiftingProblem& p, const Tower& t);

ClassSet compute_classes(Engine& e);
Certificate decide_nonempty(const Tower& t, WeakMalcev& w, const LiftingProblem& p);

/// The suspended problem (Δ¹×X, ∂Δ¹×X) into the tower of Σ_B Y, with both
/// ends on the zero section. Requires A = ∅ and that zero coordinates are a
/// section of every stage.
LiftingProblem suspended_problem(const LiftingProblem& p, const Tower& suspension);

struct RouteComparison {
    bool agree;
    std::string main, suspension;
};
RouteComparison compare_routes(const ClassSet& main, const ClassSet& suspension);

/// Exhaustive check of t on all triples of a finite heap of representatives:
/// returns the number of triples where the class of op(x, r, y) differs from
/// x - r + y.
std::size_t check_class_malcev(Engine& e, ClassOperation& op, std::size_t max_elements = 8);

}  // namespace heapstone
