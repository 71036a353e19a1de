#include "eventcast/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace eventcast {

namespace {

Predicate make_node(PredNode n) { return std::make_shared<const PredNode>(std::move(n)); }

const char* op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
    }
    return "?";
}

std::string value_text(const AttrValue& v) {
    if (const double* d = std::get_if<double>(&v)) {
        std::ostringstream os;
        os.precision(15);
        os << *d;
        return os.str();
    }
    return "'" + std::get<std::string>(v) + "'";
}

}  // namespace

Predicate pred_true() {
    static Predicate t = make_node(PredNode{.kind = PredNode::Kind::True});
    return t;
}

Predicate pred_false() {
    static Predicate f = make_node(PredNode{.kind = PredNode::Kind::False});
    return f;
}

Predicate pred_cmp(std::string attribute, CmpOp op, AttrValue constant) {
    PredNode n;
    n.kind = PredNode::Kind::Cmp;
    n.attribute = std::move(attribute);
    n.op = op;
    n.constant = std::move(constant);
    return make_node(std::move(n));
}

Predicate pred_external(std::string name, ExternalFn fn) {
    PredNode n;
    n.kind = PredNode::Kind::External;
    n.name = std::move(name);
    n.fn = std::move(fn);
    return make_node(std::move(n));
}

Predicate pred_and(Predicate a, Predicate b) {
    PredNode n;
    n.kind = PredNode::Kind::And;
    n.left = std::move(a);
    n.right = std::move(b);
    return make_node(std::move(n));
}

Predicate pred_or(Predicate a, Predicate b) {
    PredNode n;
    n.kind = PredNode::Kind::Or;
    n.left = std::move(a);
    n.right = std::move(b);
    return make_node(std::move(n));
}

Predicate pred_not(Predicate a) {
    PredNode n;
    n.kind = PredNode::Kind::Not;
    n.left = std::move(a);
    return make_node(std::move(n));
}

bool eval_predicate(const Predicate& p, const Event& e) {
    switch (p->kind) {
        case PredNode::Kind::True: return true;
        case PredNode::Kind::False: return false;
        case PredNode::Kind::Cmp: {
            if (const double* c = std::get_if<double>(&p->constant)) {
                double v = e.number(p->attribute);
                switch (p->op) {
                    case CmpOp::Lt: return v < *c;
                    case CmpOp::Le: return v <= *c;
                    case CmpOp::Gt: return v > *c;
                    case CmpOp::Ge: return v >= *c;
                    case CmpOp::Eq: return v == *c;
                    case CmpOp::Ne: return v != *c;
                }
                return false;
            }
            const std::string& c = std::get<std::string>(p->constant);
            const std::string& v = e.text(p->attribute);
            switch (p->op) {
                case CmpOp::Eq: return v == c;
                case CmpOp::Ne: return v != c;
                case CmpOp::Lt: return v < c;
                case CmpOp::Le: return v <= c;
                case CmpOp::Gt: return v > c;
                case CmpOp::Ge: return v >= c;
            }
            return false;
        }
        case PredNode::Kind::External:
            if (!p->fn) throw_config("external predicate '" + p->name + "' has no registered function");
            return p->fn(e);
        case PredNode::Kind::And: return eval_predicate(p->left, e) && eval_predicate(p->right, e);
        case PredNode::Kind::Or: return eval_predicate(p->left, e) || eval_predicate(p->right, e);
        case PredNode::Kind::Not: return !eval_predicate(p->left, e);
    }
    throw_internal("corrupt predicate node");
}

std::string to_string(const Predicate& p) {
    switch (p->kind) {
        case PredNode::Kind::True: return "true";
        case PredNode::Kind::False: return "false";
        case PredNode::Kind::Cmp:
            return p->attribute + " " + op_text(p->op) + " " + value_text(p->constant);
        case PredNode::Kind::External: return p->name;
        case PredNode::Kind::And:
            return "(" + to_string(p->left) + " & " + to_string(p->right) + ")";
        case PredNode::Kind::Or:
            return "(" + to_string(p->left) + " | " + to_string(p->right) + ")";
        case PredNode::Kind::Not: return "!(" + to_string(p->left) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// predicate expression parser

namespace {

struct PredParser {
    const std::string& text;
    size_t pos = 0;
    const PredicateResolver& resolver;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(const char* tok) {
        skip_ws();
        size_t n = std::strlen(tok);
        if (text.compare(pos, n, tok) == 0) {
            pos += n;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) {
        throw_config("predicate syntax error at position " + std::to_string(pos) + ": " + what +
                     " in '" + text + "'");
    }

    Predicate parse() {
        Predicate p = parse_or();
        skip_ws();
        if (pos != text.size()) fail("trailing input");
        return p;
    }

    Predicate parse_or() {
        Predicate p = parse_and();
        for (;;) {
            skip_ws();
            if (eat("||") || (peek() == '|' && ++pos)) {
                p = pred_or(p, parse_and());
            } else {
                return p;
            }
        }
    }

    Predicate parse_and() {
        Predicate p = parse_unary();
        for (;;) {
            skip_ws();
            if (eat("&&") || (peek() == '&' && ++pos)) {
                p = pred_and(p, parse_unary());
            } else {
                return p;
            }
        }
    }

    Predicate parse_unary() {
        skip_ws();
        if (eat("!")) return pred_not(parse_unary());
        if (eat("(")) {
            Predicate p = parse_or();
            if (!eat(")")) fail("expected ')'");
            return p;
        }
        return parse_atom();
    }

    std::string parse_identifier() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '.')) {
            ++pos;
        }
        if (pos == start) fail("expected identifier");
        return text.substr(start, pos - start);
    }

    Predicate parse_atom() {
        std::string ident = parse_identifier();
        if (ident == "true") return pred_true();
        if (ident == "false") return pred_false();

        skip_ws();
        CmpOp op;
        bool is_cmp = true;
        if (eat("<=")) op = CmpOp::Le;
        else if (eat(">=")) op = CmpOp::Ge;
        else if (eat("!=")) op = CmpOp::Ne;
        else if (eat("==")) op = CmpOp::Eq;
        else if (eat("<")) op = CmpOp::Lt;
        else if (eat(">")) op = CmpOp::Gt;
        else if (eat("=")) op = CmpOp::Eq;
        else is_cmp = false;

        if (!is_cmp) {
            if (!resolver) fail("unknown predicate '" + ident + "'");
            Predicate p = resolver(ident);
            if (!p) fail("unknown predicate '" + ident + "'");
            return p;
        }

        skip_ws();
        if (pos < text.size() && (text[pos] == '\'' || text[pos] == '"')) {
            char quote = text[pos++];
            size_t start = pos;
            while (pos < text.size() && text[pos] != quote) ++pos;
            if (pos == text.size()) fail("unterminated string literal");
            std::string value = text.substr(start, pos - start);
            ++pos;
            return pred_cmp(ident, op, value);
        }
        size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
                text[pos] == '-' || text[pos] == '+' || text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
        }
        if (pos == start) fail("expected literal after comparison operator");
        try {
            double value = std::stod(text.substr(start, pos - start));
            return pred_cmp(ident, op, value);
        } catch (const std::exception&) {
            fail("bad numeric literal");
        }
    }
};

}  // namespace

Predicate parse_predicate(const std::string& text, const PredicateResolver& resolver) {
    PredParser p{text, 0, resolver};
    return p.parse();
}

// ---------------------------------------------------------------------------
// minterms

std::string Minterm::description() const {
    if (conjuncts.empty()) return "true";
    std::string out;
    for (size_t i = 0; i < conjuncts.size(); ++i) {
        if (i) out += " & ";
        const auto& [p, pol] = conjuncts[i];
        out += pol ? to_string(p) : "!(" + to_string(p) + ")";
    }
    return out;
}

MintermSet::MintermSet(std::vector<Predicate> preds, std::vector<std::vector<int>> exclusion_groups)
    : preds_(std::move(preds)), groups_(std::move(exclusion_groups)) {
    const int k = static_cast<int>(preds_.size());
    if (k == 0) throw_config("cannot build minterms from an empty predicate list");
    if (k > 20) throw_budget("too many predicates for minterm construction: " + std::to_string(k));
    for (const auto& g : groups_) {
        std::vector<int> sorted(g);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw_config("exclusion group lists the same predicate twice");
        for (int idx : g) {
            if (idx < 0 || idx >= k) throw_config("exclusion group references unknown predicate index");
        }
    }

    // Sign assignments enumerated as polarity bit-vectors, predicate 0 in the
    // most significant position, all-positive first. This fixes the dense
    // symbol ids deterministically.
    const std::uint64_t total = std::uint64_t{1} << k;
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        const std::uint64_t bits = total - 1 - rank;
        bool refuted = false;
        for (const auto& g : groups_) {
            int positives = 0;
            for (int idx : g) {
                if (bits & (std::uint64_t{1} << (k - 1 - idx))) ++positives;
            }
            if (positives >= 2) {
                refuted = true;
                break;
            }
        }
        if (refuted) continue;

        Minterm m;
        m.id = static_cast<int>(minterms_.size());
        for (int i = 0; i < k; ++i) {
            const bool positive = bits & (std::uint64_t{1} << (k - 1 - i));
            if (!positive) {
                // Simplification: a positive group member entails the negation
                // of every other member, so the negative conjunct is dropped.
                bool entailed = false;
                for (const auto& g : groups_) {
                    if (std::find(g.begin(), g.end(), i) == g.end()) continue;
                    for (int j : g) {
                        if (j == i) continue;
                        if (bits & (std::uint64_t{1} << (k - 1 - j))) {
                            entailed = true;
                            break;
                        }
                    }
                    if (entailed) break;
                }
                if (entailed) continue;
            }
            m.conjuncts.emplace_back(preds_[static_cast<size_t>(i)], positive);
        }
        signature_to_id_[bits] = m.id;
        signatures_.push_back(bits);
        minterms_.push_back(std::move(m));
    }
    if (minterms_.empty()) throw_config("inconsistent exclusions: every sign assignment was refuted");
}

std::optional<int> MintermSet::classify(const Event& e) const {
    const int k = static_cast<int>(preds_.size());
    std::uint64_t bits = 0;
    for (int i = 0; i < k; ++i) {
        if (eval_predicate(preds_[static_cast<size_t>(i)], e))
            bits |= std::uint64_t{1} << (k - 1 - i);
    }
    auto it = signature_to_id_.find(bits);
    if (it == signature_to_id_.end()) return std::nullopt;  // declared exclusion violated
    return it->second;
}

bool MintermSet::polarity(int id, int pred_index) const {
    const int k = static_cast<int>(preds_.size());
    return signatures_[static_cast<size_t>(id)] & (std::uint64_t{1} << (k - 1 - pred_index));
}

int MintermSet::index_of(const Predicate& p) const {
    const std::string key = to_string(p);
    for (size_t i = 0; i < preds_.size(); ++i) {
        if (to_string(preds_[i]) == key) return static_cast<int>(i);
    }
    return -1;
}

MintermSet build_minterms(std::vector<Predicate> preds, std::vector<std::vector<int>> exclusion_groups) {
    // Syntactic dedup keeps the first occurrence's position.
    std::vector<Predicate> unique;
    std::vector<std::string> seen;
    for (auto& p : preds) {
        std::string key = to_string(p);
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(std::move(key));
            unique.push_back(std::move(p));
        }
    }
    return MintermSet(std::move(unique), std::move(exclusion_groups));
}

std::optional<int> classify_event(const MintermSet& minterms, const Event& e) {
    return minterms.classify(e);
}

// ---------------------------------------------------------------------------
// satisfiability heuristics

namespace {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false;
    bool hi_open = false;
    std::vector<double> excluded;

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi && (lo_open || hi_open)) return true;
        if (lo == hi) {
            for (double x : excluded)
                if (x == lo) return true;
        }
        return false;
    }
};

void tighten(Interval& iv, CmpOp op, double c, bool positive) {
    if (!positive) {
        switch (op) {
            case CmpOp::Lt: op = CmpOp::Ge; break;
            case CmpOp::Le: op = CmpOp::Gt; break;
            case CmpOp::Gt: op = CmpOp::Le; break;
            case CmpOp::Ge: op = CmpOp::Lt; break;
            case CmpOp::Eq: op = CmpOp::Ne; break;
            case CmpOp::Ne: op = CmpOp::Eq; break;
        }
    }
    switch (op) {
        case CmpOp::Lt:
            if (c < iv.hi || (c == iv.hi && !iv.hi_open)) { iv.hi = c; iv.hi_open = true; }
            break;
        case CmpOp::Le:
            if (c < iv.hi) { iv.hi = c; iv.hi_open = false; }
            break;
        case CmpOp::Gt:
            if (c > iv.lo || (c == iv.lo && !iv.lo_open)) { iv.lo = c; iv.lo_open = true; }
            break;
        case CmpOp::Ge:
            if (c > iv.lo) { iv.lo = c; iv.lo_open = false; }
            break;
        case CmpOp::Eq:
            if (c > iv.lo) { iv.lo = c; iv.lo_open = false; }
            if (c < iv.hi) { iv.hi = c; iv.hi_open = false; }
            break;
        case CmpOp::Ne: iv.excluded.push_back(c); break;
    }
}

}  // namespace

namespace {

// Flattens a literal into comparison constraints where the Boolean structure
// allows it: positive ANDs and negated ORs split, negations flip. Anything
// else stays undecided.
bool flatten_literal(const Predicate& p, bool positive, std::map<std::string, Interval>& intervals) {
    switch (p->kind) {
        case PredNode::Kind::False: return !positive;
        case PredNode::Kind::True: return positive;
        case PredNode::Kind::Not: return flatten_literal(p->left, !positive, intervals);
        case PredNode::Kind::And:
            if (positive) {
                return flatten_literal(p->left, true, intervals) &&
                       flatten_literal(p->right, true, intervals);
            }
            return true;  // a disjunctive constraint, undecided
        case PredNode::Kind::Or:
            if (!positive) {
                return flatten_literal(p->left, false, intervals) &&
                       flatten_literal(p->right, false, intervals);
            }
            return true;
        case PredNode::Kind::Cmp: {
            const double* c = std::get_if<double>(&p->constant);
            if (!c) return true;  // string comparisons undecided
            tighten(intervals[p->attribute], p->op, *c, positive);
            return true;
        }
        case PredNode::Kind::External: return true;
    }
    return true;
}

}  // namespace

bool satisfiable_conjunction(const std::vector<std::pair<Predicate, bool>>& conjuncts) {
    std::map<std::string, Interval> intervals;
    for (const auto& [p, positive] : conjuncts) {
        if (!flatten_literal(p, positive, intervals)) return false;
    }
    for (const auto& [attr, iv] : intervals) {
        if (iv.empty()) return false;
    }
    return true;
}

bool predicate_holds_on_minterm(const Predicate& p, int symbol, const MintermSet& minterms) {
    switch (p->kind) {
        case PredNode::Kind::True: return true;
        case PredNode::Kind::False: return false;
        default: break;
    }
    // a base predicate may itself be a composed formula; match it wholesale
    // before decomposing
    if (int idx = minterms.index_of(p); idx >= 0) return minterms.polarity(symbol, idx);
    switch (p->kind) {
        case PredNode::Kind::Not: return !predicate_holds_on_minterm(p->left, symbol, minterms);
        case PredNode::Kind::And:
            return predicate_holds_on_minterm(p->left, symbol, minterms) &&
                   predicate_holds_on_minterm(p->right, symbol, minterms);
        case PredNode::Kind::Or:
            return predicate_holds_on_minterm(p->left, symbol, minterms) ||
                   predicate_holds_on_minterm(p->right, symbol, minterms);
        default:
            throw_config("predicate '" + to_string(p) + "' is not part of the minterm alphabet");
    }
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

ExternalFn inside_radius_predicate(double lat, double lon, double radius_km,
                                   std::string lat_attr, std::string lon_attr) {
    return [=](const Event& e) {
        return haversine_km(e.number(lat_attr), e.number(lon_attr), lat, lon) < radius_km;
    };
}

}  // namespace eventcast
