// Symbolic message terms under the perfect-cryptography assumption:
// analysis (projection, decryption with a held key), synthesis (pairing,
// encryption), and a canonical normal form for commutative encryption
// stacks. All values are immutable.

#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace madsim {

enum class TermKind { AgentName, Atom, SymKey, Pair, Enc };

enum class AtomTag { Nonce, Payload, Fake };

class Term;
using TermPtr = std::shared_ptr<const Term>;

class Term {
public:
    static TermPtr agent(std::string id);
    static TermPtr atom(std::string label, AtomTag tag = AtomTag::Payload);
    static TermPtr sym_key(std::string label);
    static TermPtr pair(TermPtr left, TermPtr right);
    static TermPtr enc(TermPtr body, TermPtr key, bool commutative = false);

    TermKind kind() const { return kind_; }
    const std::string& label() const { return label_; }   // AgentName/Atom/SymKey
    AtomTag tag() const { return tag_; }                   // Atom only
    const TermPtr& left() const { return left_; }          // Pair
    const TermPtr& right() const { return right_; }        // Pair
    const TermPtr& body() const { return left_; }          // Enc
    const TermPtr& key() const { return right_; }          // Enc
    bool commutative() const { return commutative_; }      // Enc

private:
    TermKind kind_;
    std::string label_;
    AtomTag tag_ = AtomTag::Payload;
    TermPtr left_, right_;
    bool commutative_ = false;

    friend TermPtr make_term(Term&&);
    Term() = default;
};

// Total structural order (after normalization this orders equivalence
// classes); equality modulo commutative-layer reordering goes through
// normalize().
int term_cmp(const TermPtr& a, const TermPtr& b);
bool term_eq(const TermPtr& a, const TermPtr& b);

struct TermLess {
    bool operator()(const TermPtr& a, const TermPtr& b) const { return term_cmp(a, b) < 0; }
};

using Dataset = std::set<TermPtr, TermLess>;

/// Canonical representative: maximal runs of commutative Enc layers are
/// sorted by key; idempotent.
TermPtr normalize(const TermPtr& t);

/// Least fixpoint of d under Proj and Decr (symmetric keys, k^-1 = k).
/// Commutative layers peel in any order for which the key is present.
Dataset analyze_closure(const Dataset& d);

/// Derivability of goal from an analysis-closed dataset by Comp and Encr.
bool can_synthesize(const TermPtr& goal, const Dataset& closed);

bool contains(const Dataset& d, const TermPtr& t);

// Serialization grammar: `A`, `atom:x`, `nonce:x`, `fake:x`, `key:kAS`,
// `pair(t1,t2)`, `enc(t,k)`, `cenc(t,k)`. print/parse round-trip exactly.
std::string print_term(const TermPtr& t);
TermPtr parse_term(std::string_view text);  // throws TermParseError

struct TermParseError : std::runtime_error {
    explicit TermParseError(const std::string& what) : std::runtime_error(what) {}
};

std::string print_dataset(const Dataset& d);

}  // namespace madsim
