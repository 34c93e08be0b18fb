#include "madsim/term.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace madsim {

TermPtr make_term(Term&& t) { return std::make_shared<const Term>(std::move(t)); }

TermPtr Term::agent(std::string id) {
    Term t;
    t.kind_ = TermKind::AgentName;
    t.label_ = std::move(id);
    return make_term(std::move(t));
}

TermPtr Term::atom(std::string label, AtomTag tag) {
    Term t;
    t.kind_ = TermKind::Atom;
    t.label_ = std::move(label);
    t.tag_ = tag;
    return make_term(std::move(t));
}

TermPtr Term::sym_key(std::string label) {
    Term t;
    t.kind_ = TermKind::SymKey;
    t.label_ = std::move(label);
    return make_term(std::move(t));
}

TermPtr Term::pair(TermPtr left, TermPtr right) {
    Term t;
    t.kind_ = TermKind::Pair;
    t.left_ = std::move(left);
    t.right_ = std::move(right);
    return make_term(std::move(t));
}

TermPtr Term::enc(TermPtr body, TermPtr key, bool commutative) {
    Term t;
    t.kind_ = TermKind::Enc;
    t.left_ = std::move(body);
    t.right_ = std::move(key);
    t.commutative_ = commutative;
    return make_term(std::move(t));
}

int term_cmp(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind() != b->kind()) return a->kind() < b->kind() ? -1 : 1;
    switch (a->kind()) {
        case TermKind::AgentName:
        case TermKind::SymKey:
            return a->label().compare(b->label());
        case TermKind::Atom:
            if (a->tag() != b->tag()) return a->tag() < b->tag() ? -1 : 1;
            return a->label().compare(b->label());
        case TermKind::Pair: {
            int c = term_cmp(a->left(), b->left());
            if (c != 0) return c;
            return term_cmp(a->right(), b->right());
        }
        case TermKind::Enc: {
            if (a->commutative() != b->commutative()) return a->commutative() ? 1 : -1;
            int c = term_cmp(a->body(), b->body());
            if (c != 0) return c;
            return term_cmp(a->key(), b->key());
        }
    }
    return 0;
}

bool term_eq(const TermPtr& a, const TermPtr& b) { return term_cmp(a, b) == 0; }

TermPtr normalize(const TermPtr& t) {
    switch (t->kind()) {
        case TermKind::AgentName:
        case TermKind::Atom:
        case TermKind::SymKey:
            return t;
        case TermKind::Pair: {
            TermPtr l = normalize(t->left());
            TermPtr r = normalize(t->right());
            if (l.get() == t->left().get() && r.get() == t->right().get()) return t;
            return Term::pair(std::move(l), std::move(r));
        }
        case TermKind::Enc: {
            if (!t->commutative()) {
                TermPtr b = normalize(t->body());
                TermPtr k = normalize(t->key());
                if (b.get() == t->body().get() && k.get() == t->key().get()) return t;
                return Term::enc(std::move(b), std::move(k), false);
            }
            // Collect the maximal run of commutative layers, sort its keys.
            std::vector<TermPtr> keys;
            TermPtr core = t;
            while (core->kind() == TermKind::Enc && core->commutative()) {
                keys.push_back(normalize(core->key()));
                core = core->body();
            }
            core = normalize(core);
            std::sort(keys.begin(), keys.end(),
                      [](const TermPtr& a, const TermPtr& b) { return term_cmp(a, b) < 0; });
            TermPtr out = core;
            for (const TermPtr& k : keys) out = Term::enc(out, k, true);
            return out;
        }
    }
    return t;
}

bool contains(const Dataset& d, const TermPtr& t) { return d.count(t) > 0; }

namespace {

// One analysis pass over `work`, appending newly derived terms.
bool analyze_step(Dataset& acc, std::vector<TermPtr>& fresh) {
    bool grew = false;
    auto add = [&](const TermPtr& t) {
        TermPtr n = normalize(t);
        if (acc.insert(n).second) {
            fresh.push_back(n);
            grew = true;
        }
    };
    // Snapshot; decryption keys may themselves appear later in the pass.
    std::vector<TermPtr> snapshot(acc.begin(), acc.end());
    for (const TermPtr& t : snapshot) {
        if (t->kind() == TermKind::Pair) {
            add(t->left());
            add(t->right());
        } else if (t->kind() == TermKind::Enc) {
            if (!t->commutative()) {
                if (acc.count(t->key())) add(t->body());
            } else {
                // Peel any commutative layer whose key is held.
                std::vector<TermPtr> keys;
                TermPtr core = t;
                while (core->kind() == TermKind::Enc && core->commutative()) {
                    keys.push_back(core->key());
                    core = core->body();
                }
                for (size_t i = 0; i < keys.size(); ++i) {
                    if (!acc.count(keys[i])) continue;
                    TermPtr peeled = core;
                    for (size_t j = 0; j < keys.size(); ++j)
                        if (j != i) peeled = Term::enc(peeled, keys[j], true);
                    add(peeled);
                }
            }
        }
    }
    return grew;
}

}  // namespace

Dataset analyze_closure(const Dataset& d) {
    Dataset acc;
    for (const TermPtr& t : d) acc.insert(normalize(t));
    std::vector<TermPtr> fresh;
    while (analyze_step(acc, fresh)) fresh.clear();
    return acc;
}

bool can_synthesize(const TermPtr& goal, const Dataset& closed) {
    TermPtr g = normalize(goal);
    if (closed.count(g)) return true;
    switch (g->kind()) {
        case TermKind::AgentName:
        case TermKind::Atom:
        case TermKind::SymKey:
            return false;
        case TermKind::Pair:
            return can_synthesize(g->left(), closed) && can_synthesize(g->right(), closed);
        case TermKind::Enc:
            if (!g->commutative())
                return can_synthesize(g->body(), closed) && can_synthesize(g->key(), closed);
            // A commutative stack can be built in any layer order; with the
            // stack normalized it suffices to try removing each layer whose
            // key is derivable (sub-stacks re-normalize to set members).
            {
                std::vector<TermPtr> keys;
                TermPtr core = g;
                while (core->kind() == TermKind::Enc && core->commutative()) {
                    keys.push_back(core->key());
                    core = core->body();
                }
                for (size_t i = 0; i < keys.size(); ++i) {
                    if (!can_synthesize(keys[i], closed)) continue;
                    TermPtr rest = core;
                    for (size_t j = 0; j < keys.size(); ++j)
                        if (j != i) rest = Term::enc(rest, keys[j], true);
                    if (can_synthesize(normalize(rest), closed)) return true;
                }
                return false;
            }
    }
    return false;
}

// -- serialization ------------------------------------------------------------

std::string print_term(const TermPtr& t) {
    switch (t->kind()) {
        case TermKind::AgentName:
            return t->label();
        case TermKind::Atom:
            switch (t->tag()) {
                case AtomTag::Payload: return "atom:" + t->label();
                case AtomTag::Nonce: return "nonce:" + t->label();
                case AtomTag::Fake: return "fake:" + t->label();
            }
            return {};
        case TermKind::SymKey:
            return "key:" + t->label();
        case TermKind::Pair:
            return "pair(" + print_term(t->left()) + "," + print_term(t->right()) + ")";
        case TermKind::Enc:
            return (t->commutative() ? "cenc(" : "enc(") + print_term(t->body()) + "," +
                   print_term(t->key()) + ")";
    }
    return {};
}

std::string print_dataset(const Dataset& d) {
    std::string out = "{";
    bool first = true;
    for (const TermPtr& t : d) {
        if (!first) out += ", ";
        out += print_term(t);
        first = false;
    }
    return out + "}";
}

namespace {

struct Parser {
    std::string_view text;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw TermParseError(what + " at offset " + std::to_string(pos) + " in '" +
                             std::string(text) + "'");
    }

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    // A token runs until one of the structural delimiters.
    std::string token() {
        size_t start = pos;
        while (pos < text.size() && text[pos] != '(' && text[pos] != ')' && text[pos] != ',')
            ++pos;
        if (pos == start) fail("expected term");
        return std::string(text.substr(start, pos - start));
    }

    TermPtr term() {
        size_t start = pos;
        std::string tok = token();
        if (peek() == '(') {
            ++pos;
            TermPtr first = term();
            expect(',');
            TermPtr second = term();
            expect(')');
            if (tok == "pair") return Term::pair(std::move(first), std::move(second));
            if (tok == "enc") return Term::enc(std::move(first), std::move(second), false);
            if (tok == "cenc") return Term::enc(std::move(first), std::move(second), true);
            pos = start;
            fail("unknown constructor '" + tok + "'");
        }
        if (tok.rfind("atom:", 0) == 0) return Term::atom(tok.substr(5), AtomTag::Payload);
        if (tok.rfind("nonce:", 0) == 0) return Term::atom(tok.substr(6), AtomTag::Nonce);
        if (tok.rfind("fake:", 0) == 0) return Term::atom(tok.substr(5), AtomTag::Fake);
        if (tok.rfind("key:", 0) == 0) return Term::sym_key(tok.substr(4));
        if (tok.find(':') != std::string::npos) fail("unknown prefix in '" + tok + "'");
        return Term::agent(tok);
    }
};

}  // namespace

TermPtr parse_term(std::string_view text) {
    Parser p{text};
    TermPtr t = p.term();
    if (p.pos != text.size()) p.fail("trailing input");
    return t;
}

}  // namespace madsim
