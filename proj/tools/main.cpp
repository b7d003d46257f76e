#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qidforge/bailey.hpp"
#include "qidforge/catalog.hpp"
#include "qidforge/error.hpp"
#include "qidforge/parser.hpp"
#include "qidforge/suite.hpp"
#include "qidforge/transforms.hpp"

using namespace qidforge;

namespace {

Exponent cli_order(long long order) {
    // --order is the highest exponent shown/checked; internal bounds are exclusive
    return Exponent(order + 1);
}

int report_exit(const BatchReport& rep, bool timings) {
    std::cout << rep.to_tsv(timings);
    return rep.all_ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact q-series identity engine and verification harness"};
    app.require_subcommand(1);

    std::string data_dir = default_data_dir();
    long long order = 400;
    int parallelism = static_cast<int>(std::thread::hardware_concurrency());
    if (parallelism <= 0) parallelism = 4;
    bool timings = false;
    app.add_option("--catalog", data_dir, "data directory (or QIDFORGE_CATALOG)");
    app.add_flag("--timings", timings, "fill the millis column of reports");

    auto* cmd_expand = app.add_subcommand("expand", "expand an expression as a q-series");
    std::string expr_text;
    long long expand_order = 12;
    cmd_expand->add_option("expr", expr_text, "expression in the identity language")->required();
    cmd_expand->add_option("--order", expand_order, "highest exponent to print");

    auto* cmd_verify = app.add_subcommand("verify", "verify catalog identities");
    std::string verify_id, allowlist_path;
    cmd_verify->add_option("--id", verify_id, "verify a single entry");
    cmd_verify->add_option("--order", order, "truncation order");
    cmd_verify->add_option("--allowlist", allowlist_path, "known-discrepancy allowlist file");
    cmd_verify->add_option("--parallel", parallelism, "worker threads");

    auto* cmd_table1 = app.add_subcommand("table1", "check the equivalent-products table");
    cmd_table1->add_option("--order", order, "truncation order");
    auto* cmd_table2 = app.add_subcommand("table2", "check series-equivalence rows");
    cmd_table2->add_option("--order", order, "truncation order");
    auto* cmd_table3 = app.add_subcommand("table3", "check triple-product dependence rows");
    cmd_table3->add_option("--order", order, "truncation order");

    auto* cmd_bailey = app.add_subcommand("bailey", "Bailey pair operations");
    std::string bailey_op, pair_id, limit_name;
    long long nmax = 12;
    cmd_bailey->add_option("op", bailey_op, "verify | derive | dual")->required();
    cmd_bailey->add_option("pair", pair_id, "pair id (or 'all')");
    cmd_bailey->add_option("--case", limit_name, "PBL | TBL | S1BL | S2BL | FBL");
    cmd_bailey->add_option("--nmax", nmax, "indices 0..nmax");
    cmd_bailey->add_option("--order", order, "truncation order");

    auto* cmd_transform = app.add_subcommand("transform", "parametric transformation checks");
    std::string transform_op = "verify", transform_id, assign_text;
    cmd_transform->add_option("op", transform_op, "verify | grid")->required();
    cmd_transform->add_option("id", transform_id, "template id (or 'all' with grid)");
    cmd_transform->add_option("--assign", assign_text, "e.g. \"a=q, b=-q^(1/2)\"");
    cmd_transform->add_option("--order", order, "truncation order");

    auto* cmd_dissect = app.add_subcommand("dissect", "triple-product m-dissection check");
    long long dissect_m = 2;
    std::string dissect_x = "-q", dissect_base = "q";
    cmd_dissect->add_option("--m", dissect_m, "number of residue classes")->required();
    cmd_dissect->add_option("--x", dissect_x, "monomial x");
    cmd_dissect->add_option("--base", dissect_base, "base substituted for q");
    cmd_dissect->add_option("--order", order, "truncation order");

    auto* cmd_suite = app.add_subcommand("suite", "run every check suite");
    std::string suite_what = "all";
    bool quick = false;
    cmd_suite->add_option("what", suite_what, "all");
    cmd_suite->add_flag("--quick", quick, "reduced orders for CI");
    cmd_suite->add_option("--parallel", parallelism, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_expand) {
            ExprPtr e = parse_expr(expr_text);
            validate_expr(e);
            std::cout << eval_series(e, cli_order(expand_order)).str() << "\n";
            return 0;
        }
        if (*cmd_verify) {
            Catalog cat = Catalog::load(data_dir);
            auto allow = load_allowlist(
                allowlist_path.empty() ? data_dir + "/allowlist.txt" : allowlist_path);
            if (!verify_id.empty()) {
                const IdentityRecord* rec = cat.find(verify_id);
                if (!rec) {
                    std::cerr << "unknown id " << verify_id << "\n";
                    return 2;
                }
                BatchReport rep;
                rep.add(verify_identity(*rec, cli_order(order), cat), allow.count(verify_id) > 0);
                return report_exit(rep, timings);
            }
            return report_exit(verify_all(cat, cli_order(order), allow, parallelism), timings);
        }
        if (*cmd_table1) {
            Catalog cat = Catalog::load(data_dir);
            auto rows = load_table1(data_dir + "/table1.cat");
            return report_exit(verify_table1(rows, cli_order(order), cat), timings);
        }
        if (*cmd_table2) {
            Catalog cat = Catalog::load(data_dir);
            TransformSet ts = TransformSet::load(data_dir);
            return report_exit(ts.check_table2(cli_order(order), cat), timings);
        }
        if (*cmd_table3) {
            Catalog cat = Catalog::load(data_dir);
            TransformSet ts = TransformSet::load(data_dir);
            return report_exit(ts.check_table3(cli_order(order), cat), timings);
        }
        if (*cmd_bailey) {
            PairSet pairs = PairSet::load(data_dir);
            BatchReport rep;
            if (bailey_op == "verify") {
                if (pair_id.empty() || pair_id == "all")
                    rep = pairs.verify_pairs(nmax, cli_order(order));
                else
                    rep.add(verify_pair(*pairs.require(pair_id), nmax, cli_order(order)));
            } else if (bailey_op == "dual") {
                if (pair_id.empty() || pair_id == "all")
                    rep = pairs.check_duals(nmax);
                else
                    rep.add(check_self_dual(*pairs.require(pair_id), nmax));
            } else if (bailey_op == "derive") {
                if (limit_name.empty()) {
                    std::cerr << "derive needs --case\n";
                    return 2;
                }
                LimitCase lc = parse_limit_case(limit_name);
                auto [lhs, rhs] = limit_case(*pairs.require(pair_id), lc, cli_order(order));
                Verdict v = compare_series(lhs, rhs, cli_order(order));
                v.id = pair_id + "." + limit_name;
                std::cout << "lhs: " << lhs.truncated(Exponent(21)).str() << "\n";
                std::cout << "rhs: " << rhs.truncated(Exponent(21)).str() << "\n";
                rep.add(v);
            } else {
                std::cerr << "unknown bailey operation " << bailey_op << "\n";
                return 2;
            }
            return report_exit(rep, timings);
        }
        if (*cmd_transform) {
            TransformSet ts = TransformSet::load(data_dir);
            BatchReport rep;
            if (transform_op == "verify") {
                rep.add(ts.verify_transform(transform_id, parse_assignment(assign_text),
                                            cli_order(order)));
            } else if (transform_op == "grid") {
                rep = ts.run_grids(transform_id == "all" ? "" : transform_id, cli_order(order));
            } else {
                std::cerr << "unknown transform operation " << transform_op << "\n";
                return 2;
            }
            return report_exit(rep, timings);
        }
        if (*cmd_dissect) {
            Verdict v = jtp_dissect(Monomial::parse(dissect_x), dissect_m,
                                    Monomial::parse(dissect_base), cli_order(order));
            BatchReport rep;
            rep.add(std::move(v));
            return report_exit(rep, timings);
        }
        if (*cmd_suite) {
            if (suite_what != "all") {
                std::cerr << "unknown suite " << suite_what << "\n";
                return 2;
            }
            SuiteOptions opts;
            opts.quick = quick;
            opts.parallelism = parallelism;
            opts.timings = timings;
            return run_suite_all(data_dir, opts, std::cout);
        }
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        bool usage = e.code() == Errc::IoError || e.code() == Errc::UsageError ||
                     e.code() == Errc::DuplicateId || e.code() == Errc::ParseError;
        std::cerr << e.what() << "\n";
        return usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
