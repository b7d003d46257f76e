#include "qidforge/suite.hpp"

#include <chrono>
#include <random>

#include "qidforge/error.hpp"

namespace qidforge {

BatchReport derivation_chain(const PairSet& pairs, const Catalog& cat, Exponent N) {
    BatchReport rep;
    PairPtr rr = pairs.require("RR");
    struct Row {
        LimitCase c;
        const char* id;
    };
    for (const Row& row : {Row{LimitCase::PBL, "S.18"}, Row{LimitCase::TBL, "S.36"},
                           Row{LimitCase::S1BL, "S.12"}}) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict out;
        out.id = std::string("chain.") + limit_case_name(row.c) + "->" + row.id;
        out.order_used = N;
        try {
            auto [lhs, rhs] = limit_case(*rr, row.c, N);
            Series sum = cat.eval_expr(row.id, 2, N);
            Series prod = cat.eval_expr(row.id, 1, N);
            out.matched = true;
            for (const auto& [x, y] : std::initializer_list<std::pair<const Series*, const Series*>>{
                     {&lhs, &rhs}, {&lhs, &sum}, {&rhs, &prod}}) {
                Verdict v = compare_series(*x, *y, N);
                if (v.order_used < out.order_used) out.order_used = v.order_used;
                if (!v.matched) {
                    out.matched = false;
                    out.first_mismatch = v.first_mismatch;
                    break;
                }
            }
        } catch (const std::exception& ex) {
            out.matched = false;
            out.error = ex.what();
        }
        out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        rep.add(std::move(out));
    }
    rep.sort_by_id();
    return rep;
}

BatchReport dissection_grid(Exponent N) {
    BatchReport rep;
    for (std::int64_t m = 2; m <= 5; ++m)
        for (int num = 1; num <= 3; ++num)
            for (int sign : {1, -1})
                rep.add(jtp_dissect(Monomial(Int(sign), Exponent(num, 2)), m, Monomial::q(), N));
    rep.sort_by_id();
    return rep;
}

BatchReport weierstrass_suite(const std::string& data_dir, Exponent N, bool with_random_grid) {
    BatchReport rep;
    for (const auto& w : load_winstances(data_dir + "/weierstrass.cat"))
        rep.add(weierstrass_check(w, N));

    if (with_random_grid) {
        // randomized admissible n = 3 instances: exponents in (1/2){-6..12}, base q^{5..12}
        std::mt19937 rng(987123);
        std::uniform_int_distribution<int> e2(-6, 12), tdist(5, 12), sgn(0, 1);
        int made = 0;
        while (made < 12) {
            WeierstrassInstance w;
            w.base = Monomial::q(Exponent(tdist(rng)));
            std::vector<Monomial> ms;
            for (int i = 0; i < 5; ++i)
                ms.push_back(Monomial(Int(sgn(rng) ? 1 : -1), Exponent(e2(rng), 2)));
            // b3 forced by the product invariant
            Monomial prod_a = ms[0] * ms[1] * ms[2];
            Monomial b3 = prod_a / (ms[3] * ms[4]);
            w.a = {ms[0], ms[1], ms[2]};
            w.b = {ms[3], ms[4], b3};
            w.id = "weierstrass.random" + std::to_string(made);
            try {
                Verdict v = weierstrass_check(w, N);
                if (!v.error.empty() &&
                    v.error.rfind(errc_name(Errc::InvariantViolation), 0) == 0)
                    continue; // inadmissible draw (coincident a_i); redraw
                rep.add(std::move(v));
                ++made;
            } catch (const Error&) {
                continue;
            }
        }
    }
    rep.sort_by_id();
    return rep;
}

int run_suite_all(const std::string& data_dir, const SuiteOptions& opts, std::ostream& os) {
    Exponent n_catalog(opts.quick ? 121 : 401);
    Exponent n_dep(opts.quick ? 101 : 301);
    Exponent n_grid(opts.quick ? 101 : 201);
    std::int64_t n_max = opts.quick ? 8 : 12;

    Catalog cat = Catalog::load(data_dir);
    PairSet pairs = PairSet::load(data_dir);
    TransformSet ts = TransformSet::load(data_dir);
    auto allow = load_allowlist(data_dir + "/allowlist.txt");

    bool all_ok = true;
    auto section = [&](const std::string& name, const BatchReport& rep) {
        os << "== " << name << " ==\n" << rep.to_tsv(opts.timings);
        if (!rep.all_ok()) all_ok = false;
    };

    section("catalog", verify_all(cat, n_catalog, allow, opts.parallelism));
    section("table1", verify_table1(load_table1(data_dir + "/table1.cat"), n_dep, cat));
    section("table2", ts.check_table2(n_dep, cat));
    section("table3", ts.check_table3(n_dep, cat));
    section("pairs", pairs.verify_pairs(n_max, opts.quick ? Exponent(151) : Exponent(301)));
    section("duals", pairs.check_duals(n_max));
    section("derivation-chain", derivation_chain(pairs, cat, opts.quick ? Exponent(151) : Exponent(301)));
    section("transform-grids", ts.run_grids("", n_grid));
    section("dissections", dissection_grid(n_dep));
    section("weierstrass", weierstrass_suite(data_dir, n_dep, !opts.quick));
    section("w-dependence", run_check_file(data_dir + "/wdep.cat", n_dep, cat));
    section("new-identities", run_check_file(data_dir + "/newids.cat", n_dep, cat));

    os << (all_ok ? "SUITE PASS\n" : "SUITE FAIL\n");
    return all_ok ? 0 : 1;
}

} // namespace qidforge
