#include "doctest.h"

#include "qidforge/error.hpp"
#include "qidforge/qkit.hpp"
#include "oracles.hpp"

using namespace qidforge;

namespace {
const Monomial Q = Monomial::q();
Monomial mq(long c, Exponent e) { return Monomial(Int(c), e); }
} // namespace

TEST_CASE("finite Pochhammer three-case definition") {
    CHECK(RationalFunctionQ::equal_cross(poch_finite(Q, Q, 0), RationalFunctionQ::from_int(1)));

    Series expect = Series::one();
    for (int k = 1; k <= 3; ++k) expect = expect.times_binomial(Int(-1), Exponent(k));
    CHECK(poch_finite(Q, Q, 3).num.equal_to(expect));
    CHECK(poch_finite(Q, Q, 3).den.is_one());

    // (q^3; q)_{-1} = 1/(1-q^2)
    RationalFunctionQ r = poch_finite(mq(1, 3), Q, -1);
    CHECK(RationalFunctionQ::equal_cross(
        r, RationalFunctionQ(Series::one(), Series::one().times_binomial(Int(-1), Exponent(2)))));

    // (q; q)_{-1} has the vanishing factor 1 - q q^{-1}
    CHECK_THROWS_AS((void)poch_finite(Q, Q, -1), Error);
}

TEST_CASE("Pochhammer recurrence and splitting") {
    for (const Monomial& a : {mq(1, 2), mq(-1, 0), mq(1, Exponent(1, 2)), mq(-1, 3)}) {
        for (std::int64_t n = -5; n <= 10; ++n) {
            bool skip = false;
            RationalFunctionQ lhs, rhs;
            try {
                lhs = poch_finite(a, Q, n + 1);
                rhs = poch_finite(a, Q, n) *
                      RationalFunctionQ::from_poly(
                          Series::one().times_binomial(-a.coeff, a.exp + Exponent(n)));
            } catch (const Error&) {
                skip = true; // vanishing reciprocal factor for this (a, n)
            }
            if (!skip) CHECK(RationalFunctionQ::equal_cross(lhs, rhs));
        }
        // (a)_n (a q^n)_m = (a)_{n+m}
        for (std::int64_t n = 0; n <= 6; ++n)
            for (std::int64_t m = 0; m <= 6; ++m) {
                Monomial shifted = a * Monomial::q(Exponent(n));
                CHECK(RationalFunctionQ::equal_cross(
                    poch_finite(a, Q, n) * poch_finite(shifted, Q, m),
                    poch_finite(a, Q, n + m)));
            }
    }
}

TEST_CASE("infinite Pochhammer") {
    // pentagonal-number expansion of (q;q)_inf
    Series e = poch_inf(Q, Q, Exponent(6));
    CHECK(e.coeff(0) == 1);
    CHECK(e.coeff(1) == -1);
    CHECK(e.coeff(2) == -1);
    CHECK(e.coeff(3) == 0);
    CHECK(e.coeff(4) == 0);
    CHECK(e.coeff(5) == 1);

    // (-q;q)_inf generates distinct partitions
    Series d = poch_inf(mq(-1, 1), Q, Exponent(12));
    auto counts = oracles::distinct_partition_counts(11);
    for (int k = 0; k <= 11; ++k)
        CHECK(d.coeff(Exponent(k)) == counts[static_cast<std::size_t>(k)]);

    // leading negative exponent dominates
    Series l = poch_inf(mq(-1, -3), Monomial::q(Exponent(27)), Exponent(30));
    CHECK(l.valuation() == Exponent(-3));
    CHECK(l.coeff(Exponent(-3)) == 1);

    CHECK_THROWS_AS((void)poch_inf(Q, mq(1, 0), Exponent(5)), Error);
}

TEST_CASE("theta product forms") {
    // phi(q) = 1 + 2q + 2q^4 + 2q^9 + ...
    Series phi = theta_f(Q, Q, Exponent(12));
    CHECK(phi.coeff(0) == 1);
    CHECK(phi.coeff(1) == 2);
    CHECK(phi.coeff(2) == 0);
    CHECK(phi.coeff(4) == 2);
    CHECK(phi.coeff(9) == 2);

    // f(1, q^5) has constant term 2
    Series f1 = theta_f(mq(1, 0), mq(1, 5), Exponent(10));
    CHECK(f1.coeff(0) == 2);

    // f(-q,-q^2) = (q;q)_inf
    CHECK(theta_f(mq(-1, 1), mq(-1, 2), Exponent(40)).equal_to(poch_inf(Q, Q, Exponent(40))));

    // f(-1, x) vanishes identically
    CHECK(theta_f(mq(-1, 0), mq(1, 5), Exponent(30)).is_zero());

    CHECK_THROWS_AS((void)theta_f(mq(1, 1), mq(1, -1), Exponent(5)), Error);
}

TEST_CASE("Jacobi triple product: sum equals product on a grid") {
    Exponent N(120);
    for (int tnum = 1; tnum <= 12; ++tnum) {
        Exponent t(tnum, 2);
        for (auto [ea, eb] : {std::pair<Exponent, Exponent>{t / Exponent(2), t / Exponent(2)},
                              {t / Exponent(4), t * Exponent(3) / Exponent(4)}}) {
            for (auto [sa, sb] : {std::pair<int, int>{1, 1}, {-1, 1}, {-1, -1}}) {
                Monomial a = mq(sa, ea), b = mq(sb, eb);
                CHECK(theta_f(a, b, N).equal_to(theta_f_sum(a, b, N)));
            }
        }
    }
    // Laurent-valued arguments
    CHECK(theta_f(mq(1, -3), mq(1, 30), Exponent(80))
              .equal_to(theta_f_sum(mq(1, -3), mq(1, 30), Exponent(80))));
}

TEST_CASE("theta symmetry") {
    for (auto [a, b] : {std::pair<Monomial, Monomial>{mq(1, 1), mq(1, 3)},
                        {mq(-1, Exponent(1, 2)), mq(1, 2)},
                        {mq(1, -2), mq(1, 9)}}) {
        CHECK(theta_f_sum(a, b, Exponent(60)).equal_to(theta_f_sum(b, a, Exponent(60))));
        CHECK(theta_f(a, b, Exponent(60)).equal_to(theta_f(b, a, Exponent(60))));
    }
}

TEST_CASE("special cases phi psi chi") {
    Exponent N(80);
    Monomial minus_q = mq(-1, 1);
    // phi(-q) = (q;q)inf / (-q;q)inf
    Series lhs = special_phi(minus_q, N);
    Series rhs = Series::divide(poch_inf(Q, Q, N), poch_inf(mq(-1, 1), Q, N), N);
    CHECK(lhs.equal_to(rhs));
    // psi(-q) = (q^2;q^2)inf / (-q;q^2)inf
    Series psi = special_psi(minus_q, N);
    Series psir = Series::divide(poch_inf(mq(1, 2), mq(1, 2), N),
                                 poch_inf(mq(-1, 1), mq(1, 2), N), N);
    CHECK(psi.equal_to(psir));
    // chi(-q) = (q;q^2)inf
    CHECK(special_chi(minus_q, N).equal_to(poch_inf(Q, mq(1, 2), N)));
    // f(-q) = (q;q)inf
    CHECK(special_fminus(Q, N).equal_to(poch_inf(Q, Q, N)));
}

TEST_CASE("quintuple product equals its two-theta sum form") {
    // spec example: Q(q^4, q) = f(-q^7,-q^5) + q f(-q,-q^11)
    Exponent N(100);
    Series lhs = quintuple_Q(mq(1, 4), Q, N);
    Series rhs = theta_f(mq(-1, 7), mq(-1, 5), N) +
                 theta_f(mq(-1, 1), mq(-1, 11), N).times_monomial(Int(1), Exponent(1));
    CHECK(lhs.truncated(N).equal_to(rhs.truncated(N)));

    for (int t = 2; t <= 5; ++t)
        for (int rnum = 1; rnum <= 3; ++rnum)
            for (int s : {1, -1}) {
                if (Exponent(rnum, 2) * Exponent(2) == Exponent(t)) continue; // x^2 = w degenerate
                Monomial w = mq(1, t), x = mq(s, Exponent(rnum, 2));
                CHECK(quintuple_Q(w, x, Exponent(60))
                          .equal_to(quintuple_Q_sum(w, x, Exponent(60))));
            }

    // constant term 1 for 0 < r < t/2
    CHECK(quintuple_Q(mq(1, 5), mq(-1, 2), Exponent(20)).coeff(0) == 1);
}

TEST_CASE("false theta series") {
    // direct two-sided enumeration oracle for Psi(q^2, q), n <= 6
    Exponent N(24);
    std::vector<std::pair<Exponent, Int>> terms;
    for (std::int64_t n = 0; n <= 6; ++n)
        terms.emplace_back(Exponent(2 * (n * (n + 1) / 2) + n * (n - 1) / 2), Int(1));
    for (std::int64_t n = 1; n <= 6; ++n)
        terms.emplace_back(Exponent(2 * (n * (n - 1) / 2) + n * (n + 1) / 2), Int(-1));
    std::sort(terms.begin(), terms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    Series expect = Series::from_terms(terms).truncated(N);
    CHECK(false_theta_Psi(mq(1, 2), Q, N).equal_to(expect));

    // f(a,b) - Psi(a,b) = 2 sum_{n>=1} a^{n(n-1)/2} b^{n(n+1)/2}
    Monomial a = mq(1, 3), b = mq(1, 2);
    Series diff = theta_f_sum(a, b, Exponent(40)) - false_theta_Psi(a, b, Exponent(40));
    std::vector<std::pair<Exponent, Int>> tail;
    for (std::int64_t n = 1; n <= 12; ++n) {
        Exponent e = Exponent(3 * (n * (n - 1) / 2) + 2 * (n * (n + 1) / 2));
        if (e < Exponent(40)) tail.emplace_back(e, Int(2));
    }
    CHECK(diff.equal_to(Series::from_terms(tail).truncated(Exponent(40))));

    // asymmetric in its arguments
    CHECK(!false_theta_Psi(mq(1, 2), Q, Exponent(30))
               .equal_to(false_theta_Psi(Q, mq(1, 2), Exponent(30))));
}

TEST_CASE("Bailey's theta combination") {
    CHECK(bailey_theta_combination_check(mq(1, Exponent(1, 2)), Exponent(200)).matched);
    CHECK(bailey_theta_combination_check(mq(-1, Exponent(1, 3)), Exponent(150)).matched);
    CHECK_THROWS_AS((void)bailey_theta_combination_check(Q, Exponent(20)), Error);
}
