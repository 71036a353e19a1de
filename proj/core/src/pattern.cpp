#include "eventcast/pattern.hpp"

#include <cctype>
#include <cstring>
#include <unordered_map>

#include "eventcast/error.hpp"

namespace eventcast {

namespace {

Sre make_node(SreNode n) { return std::make_shared<const SreNode>(std::move(n)); }

}  // namespace

Sre sre_epsilon() {
    static Sre eps = make_node(SreNode{.kind = SreNode::Kind::Epsilon});
    return eps;
}

Sre sre_empty() {
    static Sre empty = make_node(SreNode{.kind = SreNode::Kind::Empty});
    return empty;
}

Sre sre_pred(Predicate p) {
    SreNode n;
    n.kind = SreNode::Kind::Pred;
    n.pred = std::move(p);
    return make_node(std::move(n));
}

Sre sre_union(Sre a, Sre b) {
    SreNode n;
    n.kind = SreNode::Kind::Union;
    n.left = std::move(a);
    n.right = std::move(b);
    return make_node(std::move(n));
}

Sre sre_concat(Sre a, Sre b) {
    SreNode n;
    n.kind = SreNode::Kind::Concat;
    n.left = std::move(a);
    n.right = std::move(b);
    return make_node(std::move(n));
}

Sre sre_star(Sre a) {
    if (a->kind == SreNode::Kind::Epsilon) return a;  // eps* = eps
    SreNode n;
    n.kind = SreNode::Kind::Star;
    n.left = std::move(a);
    return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct SreParser {
    const std::string& text;
    size_t pos = 0;
    const PredicateResolver& resolver;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) {
        throw_config("pattern syntax error at position " + std::to_string(pos) + ": " + what);
    }

    Sre parse() {
        Sre r = parse_union();
        skip_ws();
        if (pos != text.size()) fail("trailing input");
        return r;
    }

    Sre parse_union() {
        Sre r = parse_concat();
        while (peek() == '+') {
            ++pos;
            r = sre_union(r, parse_concat());
        }
        return r;
    }

    Sre parse_concat() {
        Sre r = parse_factor();
        while (peek() == ';') {
            ++pos;
            r = sre_concat(r, parse_factor());
        }
        return r;
    }

    Sre parse_factor() {
        Sre r = parse_atom();
        while (peek() == '*') {
            ++pos;
            r = sre_star(r);
        }
        return r;
    }

    Sre parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("expected pattern atom");
        if (text[pos] == '(') {
            ++pos;
            Sre r = parse_union();
            if (peek() != ')') fail("expected ')'");
            ++pos;
            return r;
        }
        if (text[pos] == '!') {
            ++pos;
            Sre inner = parse_atom();
            if (inner->kind != SreNode::Kind::Pred)
                fail("'!' negates a predicate atom; regular-expression complement is not supported");
            return sre_pred(pred_not(inner->pred));
        }
        // Predicate atom: a name, an inline comparison or the constants.
        size_t start = pos;
        std::string ident;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '.')) {
            ++pos;
        }
        if (pos == start) fail("expected pattern atom");
        ident = text.substr(start, pos - start);
        if (ident == "eps") return sre_epsilon();
        if (ident == "true") return sre_pred(pred_true());
        if (ident == "false") return sre_pred(pred_false());

        skip_ws();
        static const char* cmp_ops[] = {"<=", ">=", "!=", "==", "<", ">", "="};
        for (const char* op : cmp_ops) {
            if (text.compare(pos, std::strlen(op), op) == 0) {
                // Inline comparison: delegate to the predicate parser over the
                // remainder of the atom (up to a pattern-level delimiter).
                size_t end = pos + std::strlen(op);
                while (end < text.size() && text[end] != ';' && text[end] != '+' &&
                       text[end] != ')' && text[end] != '*') {
                    ++end;
                }
                std::string expr = text.substr(start, end - start);
                pos = end;
                return sre_pred(parse_predicate(expr, resolver));
            }
        }

        if (!resolver) fail("unknown predicate '" + ident + "'");
        Predicate p = resolver(ident);
        if (!p) fail("unknown predicate '" + ident + "'");
        SreNode n;
        n.kind = SreNode::Kind::Pred;
        n.pred = std::move(p);
        return make_node(std::move(n));
    }
};

void print_sre(const Sre& r, std::string& out, int parent_level);

void print_pred_leaf(const Predicate& p, std::string& out) {
    switch (p->kind) {
        case PredNode::Kind::True: out += "true"; return;
        case PredNode::Kind::False: out += "false"; return;
        case PredNode::Kind::External: out += p->name; return;
        case PredNode::Kind::Cmp: out += to_string(p); return;
        case PredNode::Kind::Not:
            out += "!(";
            print_pred_leaf(p->left, out);
            out += ")";
            return;
        default:
            // Composed formulas only enter patterns through named predicates;
            // the canonical form is informational here.
            out += to_string(p);
            return;
    }
}

// levels: 0 union, 1 concat, 2 star/atom
void print_sre(const Sre& r, std::string& out, int parent_level) {
    switch (r->kind) {
        case SreNode::Kind::Epsilon: out += "eps"; return;
        case SreNode::Kind::Empty: out += "empty"; return;
        case SreNode::Kind::Pred: {
            std::string leaf;
            print_pred_leaf(r->pred, leaf);
            if (r->pred->kind == PredNode::Kind::Cmp) {
                out += "(" + leaf + ")";
            } else {
                out += leaf;
            }
            return;
        }
        case SreNode::Kind::Union: {
            bool parens = parent_level > 0;
            if (parens) out += "(";
            print_sre(r->left, out, 0);
            out += " + ";
            print_sre(r->right, out, 0);
            if (parens) out += ")";
            return;
        }
        case SreNode::Kind::Concat: {
            bool parens = parent_level > 1;
            if (parens) out += "(";
            print_sre(r->left, out, 1);
            out += " ; ";
            print_sre(r->right, out, 1);
            if (parens) out += ")";
            return;
        }
        case SreNode::Kind::Star:
            print_sre(r->left, out, 2);
            out += "*";
            return;
    }
}

}  // namespace

Sre parse_sre(const std::string& text, const PredicateResolver& resolver) {
    SreParser p{text, 0, resolver};
    return p.parse();
}

std::string to_string(const Sre& r) {
    std::string out;
    print_sre(r, out, 0);
    return out;
}

Sre to_streaming(const Sre& r) { return sre_concat(sre_star(sre_pred(pred_true())), r); }

Sre rewrite_skip_till_any(const Sre& r) {
    switch (r->kind) {
        case SreNode::Kind::Concat:
            return sre_concat(rewrite_skip_till_any(r->left),
                              sre_concat(sre_star(sre_pred(pred_true())),
                                         rewrite_skip_till_any(r->right)));
        case SreNode::Kind::Union:
            return sre_union(rewrite_skip_till_any(r->left), rewrite_skip_till_any(r->right));
        case SreNode::Kind::Star:
            return sre_star(rewrite_skip_till_any(r->left));
        default:
            return r;
    }
}

namespace {

void collect_atoms(const Predicate& p, std::vector<Predicate>& out, std::vector<std::string>& seen) {
    switch (p->kind) {
        case PredNode::Kind::True:
        case PredNode::Kind::False:
            return;
        case PredNode::Kind::Cmp:
        case PredNode::Kind::External: {
            std::string key = to_string(p);
            for (const auto& s : seen)
                if (s == key) return;
            seen.push_back(std::move(key));
            out.push_back(p);
            return;
        }
        case PredNode::Kind::Not:
            collect_atoms(p->left, out, seen);
            return;
        case PredNode::Kind::And:
        case PredNode::Kind::Or:
            collect_atoms(p->left, out, seen);
            collect_atoms(p->right, out, seen);
            return;
    }
}

void collect_sre(const Sre& r, std::vector<Predicate>& out, std::vector<std::string>& seen) {
    switch (r->kind) {
        case SreNode::Kind::Pred:
            collect_atoms(r->pred, out, seen);
            return;
        case SreNode::Kind::Union:
        case SreNode::Kind::Concat:
            collect_sre(r->left, out, seen);
            collect_sre(r->right, out, seen);
            return;
        case SreNode::Kind::Star:
            collect_sre(r->left, out, seen);
            return;
        default:
            return;
    }
}

}  // namespace

std::vector<Predicate> collect_predicates(const Sre& r) {
    std::vector<Predicate> out;
    std::vector<std::string> seen;
    collect_sre(r, out, seen);
    return out;
}

// ---------------------------------------------------------------------------
// declarative membership

namespace {

struct Matcher {
    std::span<const int> word;
    const MintermSet& minterms;
    // memo per node: flat (i, j) table, -1 unknown
    std::unordered_map<const SreNode*, std::vector<signed char>> memo;

    bool match(const Sre& r, int i, int j) {
        const int n = static_cast<int>(word.size());
        const size_t idx = static_cast<size_t>(i * (n + 1) + j);
        {
            auto& table = memo[r.get()];
            if (table.empty()) table.assign(static_cast<size_t>((n + 1) * (n + 1)), -1);
            // Recursive calls below may rehash `memo`; only the value is kept.
            signed char cell = table[idx];
            if (cell >= 0) return cell == 1;
        }
        bool result = false;
        switch (r->kind) {
            case SreNode::Kind::Epsilon: result = (i == j); break;
            case SreNode::Kind::Empty: result = false; break;
            case SreNode::Kind::Pred:
                result = (j == i + 1) &&
                         predicate_holds_on_minterm(r->pred, word[static_cast<size_t>(i)], minterms);
                break;
            case SreNode::Kind::Union:
                result = match(r->left, i, j) || match(r->right, i, j);
                break;
            case SreNode::Kind::Concat:
                for (int s = i; s <= j && !result; ++s)
                    result = match(r->left, i, s) && match(r->right, s, j);
                break;
            case SreNode::Kind::Star:
                if (i == j) {
                    result = true;
                } else {
                    // First iteration consumes at least one symbol.
                    for (int s = i + 1; s <= j && !result; ++s)
                        result = match(r->left, i, s) && match(r, s, j);
                }
                break;
        }
        memo[r.get()][idx] = result ? 1 : 0;
        return result;
    }
};

}  // namespace

bool sre_membership(const Sre& r, std::span<const int> word, const MintermSet& minterms) {
    Matcher m{word, minterms, {}};
    return m.match(r, 0, static_cast<int>(word.size()));
}

long match_count_oracle(const Sre& r, std::span<const int> word, const MintermSet& minterms) {
    Matcher matcher{word, minterms, {}};
    const int n = static_cast<int>(word.size());
    long count = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            if (matcher.match(r, i, j)) ++count;
        }
    }
    return count;
}

}  // namespace eventcast
