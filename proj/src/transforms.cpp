#include "qidforge/transforms.hpp"

#include <cctype>
#include <chrono>

#include "qidforge/error.hpp"
#include "qidforge/parser.hpp"

namespace qidforge {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Verdict timed(Verdict v, std::chrono::steady_clock::time_point t0) {
    v.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return v;
}

std::pair<std::string, std::string> split_relation(const std::string& rel, const std::string& where) {
    std::size_t pos = rel.find("==");
    if (pos == std::string::npos)
        throw Error(Errc::ParseError, where + ": relation needs ==");
    return {trim_copy(rel.substr(0, pos)), trim_copy(rel.substr(pos + 2))};
}

} // namespace

Assignment parse_assignment(const std::string& text) {
    Assignment out;
    for (const auto& item : split_list(text, ',')) {
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::UsageError, "assignment item without '=': " + item);
        out.emplace_back(trim_copy(item.substr(0, eq)), trim_copy(item.substr(eq + 1)));
    }
    return out;
}

std::string assignment_str(const Assignment& a) {
    std::string s;
    for (const auto& [k, v] : a) {
        if (!s.empty()) s += ",";
        s += k + "=" + v;
    }
    return s;
}

TransformSet TransformSet::load(const std::string& dir) {
    TransformSet set;
    for (const auto& b : read_blocks(dir + "/templates.cat")) {
        if (b.kind != "template") continue;
        TransformTemplate t;
        t.id = b.name;
        for (auto p : split_list(b.get("params"))) {
            if (p.size() > 4 && p.substr(p.size() - 4) == ":int") {
                p = p.substr(0, p.size() - 4);
                t.int_params.push_back(p);
            }
            t.params.push_back(p);
        }
        t.lhs_text = b.get("lhs");
        t.rhs_text = b.get("rhs");
        t.note = b.get("note");
        if (t.lhs_text.empty() || t.rhs_text.empty())
            throw Error(Errc::ParseError, "template " + t.id + " needs lhs and rhs");
        set.templates_.push_back(std::move(t));
    }
    for (const auto& b : read_blocks(dir + "/grids.cat")) {
        if (b.kind != "grid") continue;
        GridSpec g;
        g.transform = b.name;
        for (const auto& a : b.get_all("assign")) g.assignments.push_back(parse_assignment(a));
        set.grids_.push_back(std::move(g));
    }
    for (const auto& b : read_blocks(dir + "/table2.cat")) {
        if (b.kind != "table2") continue;
        Table2Row row;
        row.id = b.name;
        row.transform = b.get("transform");
        if (b.has("assign")) row.assign = parse_assignment(b.get("assign"));
        row.left = b.get("left");
        row.right = b.get("right");
        row.note = b.get("note");
        for (const auto& c : b.get_all("check"))
            row.checks.push_back(split_relation(c, "table2 " + row.id));
        set.table2_.push_back(std::move(row));
    }
    for (const auto& b : read_blocks(dir + "/table3.cat")) {
        if (b.kind != "table3") continue;
        Table3Row row;
        row.id = b.name;
        row.series = split_relation(b.get("series"), "table3 " + row.id);
        row.product = split_relation(b.get("product"), "table3 " + row.id);
        row.note = b.get("note");
        set.table3_.push_back(std::move(row));
    }
    return set;
}

const TransformTemplate* TransformSet::find(const std::string& id) const {
    for (const auto& t : templates_)
        if (t.id == id) return &t;
    return nullptr;
}

std::vector<std::string> TransformSet::ids() const {
    std::vector<std::string> out;
    for (const auto& t : templates_) out.push_back(t.id);
    return out;
}

namespace {

// replaces $name with the parenthesized value; longest names first
std::string substitute_params(const std::string& text, const Assignment& assign) {
    std::string out;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] != '$') {
            out += text[i++];
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
            ++j;
        std::string name = text.substr(i + 1, j - i - 1);
        const std::string* val = nullptr;
        for (const auto& [k, v] : assign)
            if (k == name) val = &v;
        if (!val)
            throw Error(Errc::UsageError, "no value for template parameter $" + name);
        out += "(" + *val + ")";
        i = j;
    }
    return out;
}

} // namespace

Verdict TransformSet::verify_transform(const std::string& id, const Assignment& assign,
                                       Exponent N) const {
    auto t0 = std::chrono::steady_clock::now();
    Verdict out;
    out.id = id + "[" + assignment_str(assign) + "]";
    out.order_used = N;
    const TransformTemplate* t = find(id);
    if (!t) {
        out.error = "UsageError: unknown transform " + id;
        return timed(std::move(out), t0);
    }
    try {
        for (const auto& p : t->int_params) {
            bool found = false;
            for (const auto& [k, v] : assign)
                if (k == p) {
                    found = true;
                    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos ||
                        std::stoll(v) < 1)
                        throw Error(Errc::WrongParameter,
                                    "parameter " + p + " of " + id + " must be a positive integer");
                }
            if (!found) throw Error(Errc::UsageError, "missing integer parameter " + p);
        }
        std::string lhs_text = substitute_params(t->lhs_text, assign);
        std::string rhs_text = substitute_params(t->rhs_text, assign);
        ExprPtr lhs = parse_expr(lhs_text);
        ExprPtr rhs = parse_expr(rhs_text);
        validate_expr(lhs);
        validate_expr(rhs);
        Series l = eval_series(lhs, N);
        Series r = eval_series(rhs, N);
        Verdict v = compare_series(l, r, N);
        out.matched = v.matched;
        out.first_mismatch = v.first_mismatch;
        out.order_used = v.order_used;
    } catch (const std::exception& ex) {
        out.matched = false;
        out.error = ex.what();
    }
    return timed(std::move(out), t0);
}

BatchReport TransformSet::run_grid(const std::string& id, Exponent N) const {
    BatchReport rep;
    for (const auto& g : grids_) {
        if (g.transform != id) continue;
        for (const auto& a : g.assignments) {
            Verdict v = verify_transform(id, a, N);
            if (!v.error.empty() &&
                v.error.rfind(errc_name(Errc::VanishingFactor), 0) == 0) {
                // declared-degenerate specialization: skip, keep the reason
                v.error = "skipped: " + v.error;
                v.matched = true;
                ++rep.skipped;
                rep.verdicts.push_back(std::move(v));
                continue;
            }
            rep.add(std::move(v));
        }
    }
    rep.sort_by_id();
    return rep;
}

BatchReport TransformSet::run_grids(const std::string& filter, Exponent N) const {
    BatchReport rep;
    for (const auto& g : grids_) {
        if (!filter.empty() && g.transform != filter) continue;
        rep.merge(run_grid(g.transform, N));
    }
    rep.sort_by_id();
    return rep;
}

BatchReport TransformSet::check_table2(Exponent N, const Catalog& cat) const {
    BatchReport rep;
    for (const auto& row : table2_) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict out;
        out.id = row.id;
        out.order_used = N;
        out.matched = true;
        try {
            for (const std::string& ref : {row.left, row.right})
                if (!ref.empty() && !cat.find_resolved(ref, nullptr))
                    throw Error(Errc::UnresolvedReference, "table2 row " + row.id + " cites " + ref);
            if (!row.transform.empty()) {
                Verdict tv = verify_transform(row.transform, row.assign, N);
                if (!tv.error.empty()) throw Error(Errc::InvariantViolation, tv.error);
                if (!tv.matched) {
                    out.matched = false;
                    out.first_mismatch = tv.first_mismatch;
                }
            }
            for (const auto& [l, r] : row.checks) {
                if (!out.matched) break;
                Verdict v = check_relation(l, r, N, cat);
                if (!v.error.empty()) throw Error(Errc::InvariantViolation, v.error);
                if (v.order_used < out.order_used) out.order_used = v.order_used;
                if (!v.matched) {
                    out.matched = false;
                    out.first_mismatch = v.first_mismatch;
                }
            }
        } catch (const std::exception& ex) {
            out.matched = false;
            out.error = ex.what();
        }
        rep.add(timed(std::move(out), t0));
    }
    rep.sort_by_id();
    return rep;
}

BatchReport TransformSet::check_table3(Exponent N, const Catalog& cat) const {
    BatchReport rep;
    for (const auto& row : table3_) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict out;
        out.id = row.id;
        out.order_used = N;
        out.matched = true;
        try {
            for (const auto* rel : {&row.series, &row.product}) {
                Verdict v = check_relation(rel->first, rel->second, N, cat);
                if (!v.error.empty()) throw Error(Errc::InvariantViolation, v.error);
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
        rep.add(timed(std::move(out), t0));
    }
    rep.sort_by_id();
    return rep;
}

Verdict jtp_dissect(const Monomial& x, std::int64_t m, const Monomial& base, Exponent N) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict out;
    out.id = "dissect[m=" + std::to_string(m) + ",x=" + x.str() + ",base=" + base.str() + "]";
    out.order_used = N;
    try {
        if (m < 2) throw Error(Errc::WrongParameter, "dissection needs m >= 2");
        if (!x.is_unit_coeff() || base.coeff != 1 || !(Exponent(0) < base.exp))
            throw Error(Errc::WrongParameter, "dissection needs unit x and base q^t, t > 0");
        Series lhs = product_to({[&](Exponent W) { return poch_inf(-x, base, W); },
                                 [&](Exponent W) { return poch_inf(-(base / x), base, W); },
                                 [&](Exponent W) { return poch_inf(base, base, W); }},
                                N);
        Monomial basem2 = base.pow_int(m * m);
        Series rhs = Series::zero_exact();
        for (std::int64_t r = 0; r < m; ++r) {
            Monomial pre = base.pow_int(r * (r - 1) / 2) * x.pow_int(r);
            Monomial a1 = -(x.pow_int(m) * base.pow_int((m * m - m) / 2 + m * r));
            Monomial a2 = -(x.pow_int(-m) * base.pow_int((m * m + m) / 2 - m * r));
            Series tri = product_to({[&](Exponent W) { return poch_inf(a1, basem2, W); },
                                     [&](Exponent W) { return poch_inf(a2, basem2, W); },
                                     [&](Exponent W) { return poch_inf(basem2, basem2, W); }},
                                    N - pre.exp);
            rhs = rhs + tri.times_monomial(pre.coeff, pre.exp);
        }
        Verdict v = compare_series(lhs.truncated(N), rhs.truncated(N), N);
        out.matched = v.matched;
        out.first_mismatch = v.first_mismatch;
        out.order_used = v.order_used;
    } catch (const std::exception& ex) {
        out.matched = false;
        out.error = ex.what();
    }
    return timed(std::move(out), t0);
}

Series bracket_inf(const Monomial& x, const Monomial& base, Exponent N) {
    if (x.is_zero()) throw Error(Errc::WrongParameter, "bracket of zero");
    if (x.exp < Exponent(0)) {
        // [x] = -x [1/x]
        Monomial inv = Monomial::one() / x;
        Series b = bracket_inf(inv, base, N - x.exp);
        return b.times_monomial(-x.coeff, x.exp).truncated(N);
    }
    return product_to({[&](Exponent W) { return poch_inf(x, base, W); },
                       [&](Exponent W) { return poch_inf(base / x, base, W); }},
                      N);
}

Verdict weierstrass_check(const WeierstrassInstance& inst, Exponent N) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict out;
    out.id = inst.id.empty() ? "weierstrass" : inst.id;
    out.order_used = N;
    try {
        std::size_t n = inst.a.size();
        if (n != inst.b.size() || n < 2)
            throw Error(Errc::InvariantViolation, "need equally many a_i and b_i (>= 2)");
        Monomial pa = Monomial::one(), pb = Monomial::one();
        for (const auto& m : inst.a) pa = pa * m;
        for (const auto& m : inst.b) pb = pb * m;
        if (!(pa == pb))
            throw Error(Errc::InvariantViolation,
                        "product invariant fails: prod a = " + pa.str() + ", prod b = " + pb.str());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                Monomial r = inst.a[i] / inst.a[j];
                if (r.coeff == 1 && r.exp.den == 1 && inst.base.exp.den == 1 &&
                    r.exp.num % inst.base.exp.num == 0)
                    throw Error(Errc::InvariantViolation,
                                "a_i / a_j is an integer power of the base");
            }

        // margin: bracket ratios shift valuations around
        Exponent W = N + Exponent(8) * inst.base.exp;
        Series total = Series::zero_exact();
        for (std::size_t i = 0; i < n; ++i) {
            Series num = Series::one();
            for (std::size_t j = 0; j < n; ++j)
                num = num * bracket_inf(inst.a[i] / inst.b[j], inst.base, W);
            Series den = Series::one();
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den = den * bracket_inf(inst.a[i] / inst.a[j], inst.base, W);
            total = total + Series::divide(num, den, W);
        }
        Verdict v = compare_series(total.truncated(N), Series::zero_exact(), N);
        out.matched = v.matched;
        out.first_mismatch = v.first_mismatch;
        out.order_used = v.order_used;
    } catch (const std::exception& ex) {
        out.matched = false;
        out.error = ex.what();
    }
    return timed(std::move(out), t0);
}

std::vector<WeierstrassInstance> load_winstances(const std::string& path) {
    std::vector<WeierstrassInstance> out;
    for (const auto& b : read_blocks(path)) {
        if (b.kind != "winstance") continue;
        WeierstrassInstance w;
        w.id = b.name;
        for (const auto& m : split_list(b.get("a"))) w.a.push_back(Monomial::parse(m));
        for (const auto& m : split_list(b.get("b"))) w.b.push_back(Monomial::parse(m));
        w.base = Monomial::parse(b.get("base", "q"));
        out.push_back(std::move(w));
    }
    return out;
}

BatchReport run_check_file(const std::string& path, Exponent N, const Catalog& cat) {
    BatchReport rep;
    for (const auto& b : read_blocks(path)) {
        if (b.kind != "check") continue;
        auto t0 = std::chrono::steady_clock::now();
        Verdict out;
        out.id = b.name;
        out.order_used = N;
        out.matched = true;
        try {
            for (const auto& id : b.get_all("verify")) {
                const IdentityRecord* rec = cat.find(id);
                if (!rec) throw Error(Errc::UnresolvedReference, "no catalog entry " + id);
                Verdict v = verify_identity(*rec, N, cat);
                if (!v.error.empty()) throw Error(Errc::InvariantViolation, v.error);
                if (v.order_used < out.order_used) out.order_used = v.order_used;
                if (!v.matched) {
                    out.matched = false;
                    out.first_mismatch = v.first_mismatch;
                }
            }
            for (const auto& rel : b.get_all("relation")) {
                if (!out.matched) break;
                auto [l, r] = split_relation(rel, "check " + b.name);
                Verdict v = check_relation(l, r, N, cat);
                if (!v.error.empty()) throw Error(Errc::InvariantViolation, v.error);
                if (v.order_used < out.order_used) out.order_used = v.order_used;
                if (!v.matched) {
                    out.matched = false;
                    out.first_mismatch = v.first_mismatch;
                }
            }
        } catch (const std::exception& ex) {
            out.matched = false;
            out.error = ex.what();
        }
        rep.add(timed(std::move(out), t0));
    }
    rep.sort_by_id();
    return rep;
}

} // namespace qidforge
