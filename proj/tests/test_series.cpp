#include "doctest.h"

#include <random>

#include "qidforge/error.hpp"
#include "qidforge/ratfun.hpp"
#include "qidforge/series.hpp"
#include "oracles.hpp"

using namespace qidforge;

namespace {

Series S(std::vector<std::pair<Exponent, long>> ts) {
    std::vector<std::pair<Exponent, Int>> v;
    for (auto& [e, c] : ts) v.emplace_back(e, Int(c));
    return Series::from_terms(v);
}

std::mt19937 rng(20240811);

Series random_series(bool laurent = true) {
    std::uniform_int_distribution<int> nterms(0, 8), den(1, 4), coeff(-5, 5), expo(-6, 24),
        boundk(0, 2);
    Series s = Series::zero_exact();
    int d = den(rng);
    for (int i = 0, n = nterms(rng); i < n; ++i) {
        int e = expo(rng);
        if (!laurent && e < 0) e = -e;
        s = s + Series::monomial(Int(coeff(rng)), Exponent(e, d));
    }
    if (boundk(rng) == 0) s = s.truncated(Exponent(expo(rng) + 26, d));
    return s;
}

} // namespace

TEST_CASE("addition basics") {
    Series one = Series::one();
    Series q = Series::monomial(1, 1);
    CHECK((S({{0, 1}, {1, -1}}) + q).equal_to(one));      // (1-q) + q = 1
    Series s = random_series();
    CHECK((Series::zero_exact() + s).equal_to(s));        // additive identity
    // mixed lattice: (1 + q^{1/2}) + (1 + q) = 2 + q^{1/2} + q
    Series a = S({{0, 1}, {Exponent(1, 2), 1}});
    Series b = S({{0, 1}, {1, 1}});
    CHECK((a + b).equal_to(S({{0, 2}, {Exponent(1, 2), 1}, {1, 1}})));
    CHECK((a + b).lattice_den() == 2);
}

TEST_CASE("multiplication basics") {
    Series m1 = S({{0, 1}, {1, -1}});
    Series p1 = S({{0, 1}, {1, 1}});
    CHECK((m1 * p1).equal_to(S({{0, 1}, {2, -1}})));
    Series m2 = S({{0, 1}, {2, -1}});
    Series m3 = S({{0, 1}, {3, -1}});
    // (1-q)(1-q^2)(1-q^3) = 1 - q - q^2 + q^4 + q^5 - q^6
    CHECK((m1 * m2 * m3)
              .equal_to(S({{0, 1}, {1, -1}, {2, -1}, {4, 1}, {5, 1}, {6, -1}})));
    // Laurent shift: q^-3 (1+q^3) = q^-3 + 1
    CHECK((Series::monomial(1, -3) * S({{0, 1}, {3, 1}}))
              .equal_to(S({{-3, 1}, {0, 1}})));
}

TEST_CASE("multiplication truncation bound is tight and sound") {
    Series a = S({{0, 1}, {1, -1}}).truncated(Exponent(5)); // known below 5
    Series b = Series::monomial(1, 3);                      // exact q^3
    Series p = a * b;
    REQUIRE(p.bound().has_value());
    CHECK(*p.bound() == Exponent(8)); // 5 + val(q^3)
    // zero (exact) times anything is exactly zero
    CHECK((Series::zero_exact() * a).is_zero());
    CHECK(!(Series::zero_exact() * a).bound().has_value());
    // truncated zero keeps contamination accounting
    Series z5 = Series::zero(Exponent(5));
    auto bb = (z5 * b).bound();
    REQUIRE(bb.has_value());
    CHECK(*bb == Exponent(8));
}

TEST_CASE("inversion") {
    Series m1 = S({{0, 1}, {1, -1}});
    Series inv = m1.inverted(Exponent(10));
    for (int k = 0; k < 10; ++k) CHECK(inv.coeff(Exponent(k)) == 1); // geometric series
    CHECK((m1 * inv).truncated(Exponent(10)).equal_to(Series::one()));

    // 1/(q;q)_inf agrees with brute-force partition counts
    Series euler = Series::one();
    for (int k = 1; k <= 8; ++k) euler = euler.times_binomial(Int(-1), Exponent(k));
    euler = euler.truncated(Exponent(7));
    Series pgen = euler.inverted(Exponent(7));
    auto p = oracles::partition_counts(6);
    for (int k = 0; k <= 6; ++k)
        CHECK(pgen.coeff(Exponent(k)) == p[static_cast<std::size_t>(k)]);

    CHECK_THROWS_AS((void)S({{0, 2}, {1, 1}}).inverted(Exponent(5)), Error);
    CHECK_THROWS_AS((void)Series::zero_exact().inverted(Exponent(5)), Error);
}

TEST_CASE("inverse of shifted units") {
    Series s = S({{-2, 1}, {-1, -1}}); // q^-2 (1 - q)
    Series inv = s.inverted(Exponent(6));
    CHECK((s * inv).truncated(Exponent(6)).equal_to(Series::one()));
    CHECK(inv.valuation() == Exponent(2));
}

TEST_CASE("exact division") {
    CHECK(S({{0, 2}, {1, 2}}).div_exact(2).equal_to(S({{0, 1}, {1, 1}})));
    try {
        (void)S({{0, 2}, {1, 1}}).div_exact(2);
        FAIL("expected NotDivisible");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotDivisible);
        CHECK(std::string(e.what()).find("exponent 1") != std::string::npos);
    }
}

TEST_CASE("divide clears content") {
    // (2 + 2q) / (2 - 2q) = (1+q)/(1-q)
    Series a = S({{0, 2}, {1, 2}});
    Series b = S({{0, 2}, {1, -2}});
    Series r = Series::divide(a, b, Exponent(8));
    Series expect = S({{0, 1}, {1, 1}}) * S({{0, 1}, {1, -1}}).inverted(Exponent(8));
    CHECK(r.equal_to(expect));
    CHECK_THROWS_AS((void)Series::divide(a, S({{0, 2}, {1, 1}}), Exponent(8)), Error);
}

TEST_CASE("binomial division inverts binomial multiplication") {
    for (int i = 0; i < 60; ++i) {
        Series s = random_series().truncated(Exponent(30));
        std::uniform_int_distribution<int> cd(0, 1), ed(1, 5);
        Int c = cd(rng) ? 1 : -1;
        Exponent e(ed(rng), ed(rng));
        CHECK(s.times_binomial(c, e).divided_by_binomial(c, e).equal_to(s));
        CHECK(s.times_binomial(c, -e).divided_by_binomial(c, -e).equal_to(s));
    }
}

TEST_CASE("substitute power") {
    Series s = S({{0, 1}, {1, 1}});
    CHECK(s.substitute_power(Exponent(2)).equal_to(S({{0, 1}, {2, 1}})));
    Series h = s.substitute_power(Exponent(1, 2));
    CHECK(h.equal_to(S({{0, 1}, {Exponent(1, 2), 1}})));
    CHECK(h.lattice_den() == 2);
    for (int i = 0; i < 50; ++i) {
        Series r = random_series();
        std::uniform_int_distribution<int> kd(1, 5);
        Exponent k(kd(rng), kd(rng));
        CHECK(r.substitute_power(k).substitute_power(Exponent(k.den, k.num)).equal_to(r));
    }
}

TEST_CASE("substitute q -> -q") {
    Series s = S({{0, 1}, {1, 3}, {2, -4}, {-3, 2}});
    Series t = s.substitute_neg();
    CHECK(t.coeff(Exponent(1)) == -3);
    CHECK(t.coeff(Exponent(2)) == -4);
    CHECK(t.coeff(Exponent(-3)) == -2);
    CHECK(t.substitute_neg().equal_to(s));
    CHECK_THROWS_AS((void)S({{Exponent(1, 2), 1}}).substitute_neg(), Error);
}

TEST_CASE("ring axioms on randomized inputs") {
    for (int i = 0; i < 120; ++i) {
        Series a = random_series(), b = random_series(), c = random_series();
        CHECK((a + b).equal_to(b + a));
        CHECK(((a + b) + c).equal_to(a + (b + c)));
        CHECK((a * b).equal_to(b * a));
        CHECK(((a * b) * c).equal_to(a * (b * c)));
        CHECK((a * (b + c)).equal_to(a * b + a * c));
    }
}

TEST_CASE("valuation of products adds") {
    for (int i = 0; i < 80; ++i) {
        Series a = random_series(), b = random_series();
        if (a.is_zero() || b.is_zero()) continue;
        Series p = a * b;
        if (p.is_zero()) continue;
        CHECK(p.valuation() == a.valuation() + b.valuation());
    }
}

TEST_CASE("equality uses the min bound") {
    Series a = S({{0, 1}, {1, 1}}).truncated(Exponent(3));
    Series b = S({{0, 1}, {1, 1}, {5, 9}}).truncated(Exponent(6));
    CHECK(a.equal_to(b)); // compared below 3 only
    Series c = S({{0, 1}, {2, 7}});
    auto mism = Series::first_difference(a, c);
    REQUIRE(mism.has_value());
    CHECK(mism->exponent == Exponent(1));
    CHECK(mism->lhs == 1);
    CHECK(mism->rhs == 0);
}

TEST_CASE("string form") {
    CHECK(S({{0, 1}, {1, -1}, {2, -1}, {5, 1}}).str() == "1 -q -q^2 +q^5");
    CHECK(S({{Exponent(3, 2), 2}}).str() == "2q^3/2");
    CHECK(Series::zero_exact().str() == "0");
}

TEST_CASE("rational functions") {
    Series one = Series::one();
    Series m1 = S({{0, 1}, {1, -1}}); // 1-q
    Series m2 = S({{0, 1}, {2, -1}}); // 1-q^2
    Series p1 = S({{0, 1}, {1, 1}});  // 1+q

    RationalFunctionQ rf(m2, m1);
    CHECK(RationalFunctionQ::equal_cross(rf.inverse(), RationalFunctionQ(one, p1)));

    RationalFunctionQ a(one, m1);
    CHECK(RationalFunctionQ::equal_cross(a * RationalFunctionQ::from_poly(m1),
                                         RationalFunctionQ::from_int(1)));
    CHECK((a + (-a)).is_zero());

    // q -> 1/q : (1-q) becomes -q^-1 (1-q); cross-equal after clearing
    RationalFunctionQ g = RationalFunctionQ::from_poly(m1).substitute_qinv();
    CHECK(RationalFunctionQ::equal_cross(
        g, RationalFunctionQ(Series::monomial(-1, -1) * m1, one)));
}

TEST_CASE("qinv is an involution up to cross-equality") {
    for (int i = 0; i < 60; ++i) {
        Series n = random_series();
        Series d = random_series();
        if (!n.is_exact()) n = S({{0, 1}, {2, 3}});
        if (d.is_zero() || !d.is_exact()) d = S({{0, 1}, {1, -1}});
        RationalFunctionQ r(n, d);
        CHECK(RationalFunctionQ::equal_cross(r.substitute_qinv().substitute_qinv(), r));
    }
}

TEST_CASE("to_series honours content and monomial clearing") {
    // (2q^2 + 2q^3) / (2q) = q + q^2
    RationalFunctionQ r(S({{2, 2}, {3, 2}}), S({{1, 2}}));
    CHECK(r.to_series(Exponent(10)).equal_to(S({{1, 1}, {2, 1}})));
    RationalFunctionQ bad(S({{0, 1}}), S({{0, 2}, {1, 1}}));
    CHECK_THROWS_AS((void)bad.to_series(Exponent(5)), Error);
}
