#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eventcast/event.hpp"

namespace eventcast {

/// Unary predicates over events, closed under the Boolean connectives.
/// Leaves are TRUE/FALSE, attribute-vs-constant comparisons and named
/// externally-registered predicates (for things like geo computations).
/// Predicates are immutable trees shared by value.

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct PredNode;
using Predicate = std::shared_ptr<const PredNode>;

// Externally registered predicate: opaque boolean function of the event.
using ExternalFn = std::function<bool(const Event&)>;

struct PredNode {
    enum class Kind { True, False, Cmp, External, And, Or, Not };

    Kind kind = Kind::True;

    // Cmp
    std::string attribute;
    CmpOp op = CmpOp::Lt;
    AttrValue constant = 0.0;

    // External
    std::string name;
    ExternalFn fn;

    // And/Or/Not
    Predicate left;
    Predicate right;
};

Predicate pred_true();
Predicate pred_false();
Predicate pred_cmp(std::string attribute, CmpOp op, AttrValue constant);
Predicate pred_external(std::string name, ExternalFn fn);
Predicate pred_and(Predicate a, Predicate b);
Predicate pred_or(Predicate a, Predicate b);
Predicate pred_not(Predicate a);

/// Total evaluation: TRUE or FALSE for every event, or a missing-attribute /
/// type-mismatch error if the pattern references attributes the event lacks.
bool eval_predicate(const Predicate& p, const Event& e);

/// Canonical text form; two predicates are treated as the same iff their
/// canonical forms match (syntactic deduplication).
std::string to_string(const Predicate& p);

/// Resolves identifiers appearing in predicate expressions to previously
/// registered predicates (named config predicates or externals).
using PredicateResolver = std::function<Predicate(const std::string&)>;

/// Parses a predicate expression: comparisons `attr < 42`, `country = 'MA'`,
/// connectives `!`, `&`/`&&`, `|`/`||`, parentheses, `true`, `false`, and
/// bare identifiers resolved through `resolver`.
Predicate parse_predicate(const std::string& text, const PredicateResolver& resolver = nullptr);

/// One maximal satisfiable sign assignment over the pattern predicates.
/// After relabeling, the dense `id` is the alphabet symbol the stream is
/// mapped onto.
struct Minterm {
    int id = 0;
    // (predicate, polarity) conjuncts surviving mutual-exclusion simplification
    std::vector<std::pair<Predicate, bool>> conjuncts;

    std::string description() const;
};

/// The full alphabet of a pattern: every sign assignment over the base
/// predicates minus the ones refuted by a declared mutual-exclusion group.
class MintermSet {
public:
    MintermSet() = default;
    MintermSet(std::vector<Predicate> preds,
               std::vector<std::vector<int>> exclusion_groups);

    int size() const { return static_cast<int>(minterms_.size()); }
    const std::vector<Minterm>& minterms() const { return minterms_; }
    const Minterm& minterm(int id) const { return minterms_[static_cast<size_t>(id)]; }
    const std::vector<Predicate>& base_predicates() const { return preds_; }
    const std::vector<std::vector<int>>& exclusion_groups() const { return groups_; }

    /// Maps an event to the unique minterm it satisfies. Returns nullopt when
    /// the event violates a declared exclusion (reported and skipped upstream).
    std::optional<int> classify(const Event& e) const;

    /// Polarity of base predicate `pred_index` inside minterm `id`.
    bool polarity(int id, int pred_index) const;

    /// Index of a base predicate by canonical form, -1 if absent.
    int index_of(const Predicate& p) const;

private:
    std::vector<Predicate> preds_;
    std::vector<std::vector<int>> groups_;
    std::vector<Minterm> minterms_;
    std::vector<std::uint64_t> signatures_;        // polarity bits per minterm, pred 0 = MSB side
    std::map<std::uint64_t, int> signature_to_id_;
};

/// Builds the simplified minterm set: all 2^|preds| assignments minus those
/// refuted by an exclusion group; within a surviving minterm, a positive
/// member of a group drops the negative conjuncts of the other members.
MintermSet build_minterms(std::vector<Predicate> preds,
                          std::vector<std::vector<int>> exclusion_groups = {});

/// classify via a prebuilt set; nullopt = declared exclusions violated.
std::optional<int> classify_event(const MintermSet& minterms, const Event& e);

/// Best-effort satisfiability of a conjunction of (predicate, polarity)
/// literals: syntactic FALSE, exclusion refutation and interval reasoning
/// over same-attribute comparisons. Anything it cannot decide is reported
/// satisfiable. No general SAT.
bool satisfiable_conjunction(const std::vector<std::pair<Predicate, bool>>& conjuncts);

/// Truth value of a predicate under the polarity assignment of one minterm
/// symbol. Resolves atoms through the minterm set, never touches events;
/// errors if the predicate uses an atom outside the alphabet.
bool predicate_holds_on_minterm(const Predicate& p, int symbol, const MintermSet& minterms);

/// Great-circle distance helper for InsidePort-style external predicates.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// External predicate: true when the event's (lat, lon) lies within
/// `radius_km` of the given point.
ExternalFn inside_radius_predicate(double lat, double lon, double radius_km,
                                   std::string lat_attr = "lat", std::string lon_attr = "lon");

}  // namespace eventcast
