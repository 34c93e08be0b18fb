#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "madsim/term.hpp"
#include "support/term_props.hpp"

using namespace madsim;

namespace {
TermPtr A() { return Term::agent("A"); }
TermPtr B() { return Term::agent("B"); }
TermPtr k(const char* l) { return Term::sym_key(l); }
TermPtr m(const char* l) { return Term::atom(l); }
}  // namespace

TEST_CASE("analyze_closure projects pairs") {
    Dataset d{normalize(Term::pair(A(), B()))};
    Dataset c = analyze_closure(d);
    CHECK(contains(c, A()));
    CHECK(contains(c, B()));
}

TEST_CASE("analyze_closure of the empty set is empty") {
    CHECK(analyze_closure({}).empty());
}

TEST_CASE("analyze_closure decrypts with a held symmetric key") {
    Dataset d{normalize(Term::enc(m("m"), k("k"))), k("k")};
    CHECK(contains(analyze_closure(d), m("m")));
}

TEST_CASE("closure without the key keeps the body opaque") {
    Dataset d{normalize(Term::enc(m("m"), k("k")))};
    Dataset c = analyze_closure(d);
    CHECK(!contains(c, m("m")));
    CHECK(!can_synthesize(m("m"), c));
}

TEST_CASE("commutative stacks peel in any order; brute-force oracle agrees") {
    // {cenc(cenc(M,kA),kB), kB} must yield cenc(M,kA).
    TermPtr M = m("M");
    TermPtr stack = Term::enc(Term::enc(M, k("kA"), true), k("kB"), true);
    Dataset d{normalize(stack), k("kB")};
    Dataset c = analyze_closure(d);
    CHECK(contains(c, normalize(Term::enc(M, k("kA"), true))));
    CHECK(props::equal(c, props::brute_force_closure(d)));

    // Inner-layer key alone also peels its layer.
    Dataset d2{normalize(stack), k("kA")};
    Dataset c2 = analyze_closure(d2);
    CHECK(contains(c2, normalize(Term::enc(M, k("kB"), true))));
    CHECK(props::equal(c2, props::brute_force_closure(d2)));
}

TEST_CASE("can_synthesize: membership, pairing, encryption") {
    Dataset c = analyze_closure({m("m"), k("k")});
    CHECK(can_synthesize(m("m"), c));
    CHECK(can_synthesize(Term::enc(m("m"), k("k")), c));
    CHECK(can_synthesize(Term::pair(m("m"), k("k")), c));
    CHECK(!can_synthesize(m("other"), c));
}

TEST_CASE("can_synthesize respects perfect cryptography") {
    Dataset c = analyze_closure({normalize(Term::enc(m("m"), k("k")))});
    CHECK(!can_synthesize(m("m"), c));
}

TEST_CASE("can_synthesize builds commutative stacks from partial stacks") {
    TermPtr inner = Term::enc(m("M"), k("kA"), true);
    Dataset c = analyze_closure({normalize(inner), k("kB")});
    CHECK(can_synthesize(Term::enc(inner, k("kB"), true), c));
    CHECK(can_synthesize(Term::enc(Term::enc(m("M"), k("kB"), true), k("kA"), true), c));
}

TEST_CASE("normalize sorts commutative runs and leaves the rest alone") {
    TermPtr ab = Term::enc(Term::enc(m("M"), k("kA"), true), k("kB"), true);
    TermPtr ba = Term::enc(Term::enc(m("M"), k("kB"), true), k("kA"), true);
    CHECK(term_eq(normalize(ab), normalize(ba)));

    CHECK(term_eq(normalize(m("x")), m("x")));

    TermPtr strict = Term::enc(m("m"), k("k"), false);
    CHECK(term_eq(normalize(strict), strict));

    // A strict layer breaks the commutative run.
    TermPtr mixed1 = Term::enc(Term::enc(Term::enc(m("M"), k("k1"), true), k("k2"), false),
                               k("k3"), true);
    TermPtr mixed2 = Term::enc(Term::enc(Term::enc(m("M"), k("k3"), true), k("k2"), false),
                               k("k1"), true);
    CHECK(!term_eq(normalize(mixed1), normalize(mixed2)));
}

TEST_CASE("serialization grammar round-trips") {
    const char* samples[] = {
        "A",
        "atom:x",
        "nonce:n1",
        "fake:fresh:E2:1",
        "key:kAS",
        "pair(A,atom:x)",
        "enc(pair(A,B),key:kAS)",
        "cenc(cenc(atom:M,key:KA),key:KB)",
        "key:fresh:S:1",
    };
    for (const char* s : samples) {
        TermPtr t = parse_term(s);
        CHECK(print_term(t) == s);
        CHECK(term_eq(parse_term(print_term(t)), t));
    }
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(parse_term("pair(A)"), TermParseError);
    CHECK_THROWS_AS(parse_term("blob:x"), TermParseError);
    CHECK_THROWS_AS(parse_term("enc(A,key:k))"), TermParseError);
    CHECK_THROWS_AS(parse_term(""), TermParseError);
}

TEST_CASE("randomized term-algebra properties (1000 cases)") {
    auto failure = props::run_term_properties(1000, 0xC0FFEE);
    if (failure) FAIL(*failure);
}
