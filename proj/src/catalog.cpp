#include "qidforge/catalog.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "qidforge/error.hpp"
#include "qidforge/parser.hpp"

namespace qidforge {

namespace fs = std::filesystem;

std::string DataBlock::get(const std::string& key, const std::string& dflt) const {
    for (const auto& [k, v] : fields)
        if (k == key) return v;
    return dflt;
}

std::vector<std::string> DataBlock::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : fields)
        if (k == key) out.push_back(v);
    return out;
}

bool DataBlock::has(const std::string& key) const {
    for (const auto& [k, v] : fields)
        if (k == key) return true;
    return false;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            std::string t = trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

std::vector<DataBlock> read_blocks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::vector<DataBlock> blocks;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        std::string stripped;
        bool in_quote = false;
        for (char c : line) {
            if (c == '"') in_quote = !in_quote;
            if (c == '#' && !in_quote) break;
            stripped += c;
        }
        stripped = trim(stripped);
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": bad block header");
            std::string head = trim(stripped.substr(1, stripped.size() - 2));
            std::size_t sp = head.find_first_of(" \t");
            DataBlock b;
            b.kind = sp == std::string::npos ? head : head.substr(0, sp);
            b.name = sp == std::string::npos ? "" : trim(head.substr(sp + 1));
            b.file = path;
            b.line = lineno;
            blocks.push_back(std::move(b));
            continue;
        }
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos || blocks.empty())
            throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(stripped.substr(0, eq));
        std::string val = trim(stripped.substr(eq + 1));
        blocks.back().fields.emplace_back(key, val);
    }
    return blocks;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("QIDFORGE_CATALOG")) return env;
#ifdef QIDFORGE_SOURCE_DATA_DIR
    return QIDFORGE_SOURCE_DATA_DIR;
#else
    return "data";
#endif
}

void BatchReport::add(Verdict v, bool excused) {
    if (!v.error.empty()) {
        if (v.error.rfind("UnresolvedReference", 0) == 0) ++unresolved;
        else ++err;
    } else if (v.matched) {
        ++ok;
    } else if (excused) {
        ++allowlisted;
    } else {
        ++fail;
    }
    verdicts.push_back(std::move(v));
}

void BatchReport::merge(const BatchReport& other) {
    ok += other.ok;
    fail += other.fail;
    err += other.err;
    allowlisted += other.allowlisted;
    unresolved += other.unresolved;
    skipped += other.skipped;
    verdicts.insert(verdicts.end(), other.verdicts.begin(), other.verdicts.end());
}

void BatchReport::sort_by_id() {
    std::stable_sort(verdicts.begin(), verdicts.end(),
                     [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
}

std::string BatchReport::to_tsv(bool with_timings) const {
    std::ostringstream os;
    for (const auto& v : verdicts) {
        std::string status;
        if (!v.error.empty()) {
            if (v.error.rfind("UnresolvedReference", 0) == 0) status = "unresolved";
            else if (v.error.rfind("skipped", 0) == 0) status = "skip";
            else status = v.matched ? "skip" : "err";
        } else if (v.matched)
            status = "ok";
        else
            status = "fail";
        os << v.id << '\t' << status << '\t' << v.order_used.str() << '\t' << v.mismatch_str()
           << '\t' << (with_timings ? std::to_string(v.elapsed_ms) : "-");
        if (!v.error.empty()) os << '\t' << v.error;
        os << '\n';
    }
    os << "TOTAL ok=" << ok + allowlisted << " fail=" << fail << " err=" << err;
    if (allowlisted) os << " allowlisted=" << allowlisted;
    if (unresolved) os << " unresolved=" << unresolved;
    if (skipped) os << " skipped=" << skipped;
    os << '\n';
    return os.str();
}

Catalog Catalog::load(const std::string& path) {
    Catalog cat;
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        fs::path croot = fs::path(path) / "catalog";
        fs::path scan = fs::is_directory(croot) ? croot : fs::path(path);
        for (const auto& e : fs::directory_iterator(scan))
            if (e.path().extension() == ".cat") files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    for (const auto& f : files) {
        for (const auto& b : read_blocks(f)) {
            if (b.kind != "identity") continue;
            IdentityRecord rec;
            rec.id = b.name;
            if (rec.id.empty())
                throw Error(Errc::ParseError, f + ":" + std::to_string(b.line) + ": identity without id");
            rec.section = unquote(b.get("section"));
            if (b.has("modulus")) rec.modulus = std::stoi(b.get("modulus"));
            rec.refs = unquote(b.get("refs"));
            rec.note = unquote(b.get("note"));
            rec.known_discrepancy = b.get("status") == "known-discrepancy";
            for (const auto& a : split_list(b.get("aliases"))) rec.aliases.push_back(a);
            for (const auto& t : b.get_all("expr")) {
                rec.expr_texts.push_back(t);
                try {
                    ExprPtr e = parse_expr(t);
                    validate_expr(e);
                    rec.exprs.push_back(e);
                } catch (const Error& err) {
                    throw Error(err.code(), "entry " + rec.id + " (" + f + ":" +
                                                std::to_string(b.line) + "): " + err.what());
                }
            }
            if (rec.exprs.size() < 2)
                throw Error(Errc::ParseError, "entry " + rec.id + " needs at least two expressions");
            cat.records_.push_back(std::move(rec));
        }
    }
    for (std::size_t i = 0; i < cat.records_.size(); ++i) {
        auto insert = [&](const std::string& key) {
            auto [it, fresh] = cat.index_.emplace(key, i);
            (void)it;
            if (!fresh)
                throw Error(Errc::DuplicateId, "duplicate catalog id " + key);
        };
        insert(cat.records_[i].id);
        for (const auto& a : cat.records_[i].aliases) insert(a);
    }
    return cat;
}

Catalog Catalog::load_default() { return load(default_data_dir()); }

const IdentityRecord* Catalog::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

const IdentityRecord* Catalog::find_resolved(const std::string& id, bool* negate) const {
    if (negate) *negate = false;
    if (const IdentityRecord* r = find(id)) return r;
    if (const IdentityRecord* r = find(id + "c")) return r; // corrected form
    if (id.size() > 1 && id.back() == '-') {
        std::string base = id.substr(0, id.size() - 1);
        const IdentityRecord* r = find(base);
        if (!r) r = find(base + "c");
        if (r && negate) *negate = true;
        return r;
    }
    return nullptr;
}

Series Catalog::eval_expr(const std::string& id, int idx, Exponent N) const {
    bool negate = false;
    const IdentityRecord* rec = find_resolved(id, &negate);
    if (!rec) throw Error(Errc::UnresolvedReference, "no catalog entry " + id);
    if (idx < 1 || static_cast<std::size_t>(idx) > rec->exprs.size())
        throw Error(Errc::UnresolvedReference,
                    "entry " + id + " has no expression #" + std::to_string(idx));
    Series s = eval_series(rec->exprs[static_cast<std::size_t>(idx - 1)], N, resolver_context());
    return negate ? s.substitute_neg() : s;
}

EvalContext Catalog::resolver_context() const {
    EvalContext ctx;
    ctx.resolver = [this](const std::string& id, int idx, Exponent N) {
        return eval_expr(id, idx, N);
    };
    return ctx;
}

Verdict verify_identity(const IdentityRecord& rec, Exponent N) {
    Catalog empty;
    return verify_identity(rec, N, empty);
}

Verdict verify_identity(const IdentityRecord& rec, Exponent N, const Catalog& cat) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict out;
    out.id = rec.id;
    out.order_used = N;
    try {
        std::vector<Series> values;
        values.reserve(rec.exprs.size());
        EvalContext ctx = cat.resolver_context();
        for (const auto& e : rec.exprs) values.push_back(eval_series(e, N, ctx));
        out.matched = true;
        for (std::size_t i = 0; i < values.size() && out.matched; ++i)
            for (std::size_t j = i + 1; j < values.size() && out.matched; ++j) {
                Verdict v = compare_series(values[i], values[j], N);
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
    out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

std::map<std::string, std::string> load_allowlist(const std::string& path) {
    std::map<std::string, std::string> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t tab = t.find_first_of("\t ");
        std::string id = tab == std::string::npos ? t : t.substr(0, tab);
        std::string comment = tab == std::string::npos ? "" : trim(t.substr(tab));
        out[id] = comment;
    }
    return out;
}

BatchReport verify_all(const Catalog& cat, Exponent N,
                       const std::map<std::string, std::string>& allowlist, int parallelism) {
    const auto& recs = cat.records();
    std::vector<Verdict> verdicts(recs.size());
    std::atomic<std::size_t> next{0};
    int nthreads = std::max(1, parallelism);
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= recs.size()) return;
                verdicts[i] = verify_identity(recs[i], N, cat);
            }
        });
    for (auto& th : pool) th.join();

    BatchReport rep;
    for (std::size_t i = 0; i < recs.size(); ++i)
        rep.add(std::move(verdicts[i]), allowlist.count(recs[i].id) > 0);
    rep.sort_by_id();
    return rep;
}

Verdict check_relation(const std::string& lhs_text, const std::string& rhs_text, Exponent N,
                       const Catalog& cat) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict out;
    out.order_used = N;
    try {
        ParserOptions opts;
        opts.allow_ext = true;
        ExprPtr lhs = parse_expr(lhs_text, opts);
        ExprPtr rhs = parse_expr(rhs_text, opts);
        validate_expr(lhs, true);
        validate_expr(rhs, true);
        EvalContext ctx = cat.resolver_context();
        Series l = eval_series(lhs, N, ctx);
        Series r = eval_series(rhs, N, ctx);
        out = compare_series(l, r, N);
    } catch (const std::exception& ex) {
        out.matched = false;
        out.error = ex.what();
    }
    out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

std::vector<Table1Row> load_table1(const std::string& path) {
    std::vector<Table1Row> rows;
    for (const auto& b : read_blocks(path)) {
        if (b.kind != "table1") continue;
        Table1Row row;
        row.id = b.name;
        row.product_text = b.get("product");
        row.ids = split_list(b.get("ids"));
        row.note = unquote(b.get("note"));
        for (const auto& rel : b.get_all("relation")) {
            std::size_t pos = rel.find("==");
            if (pos == std::string::npos)
                throw Error(Errc::ParseError, "table1 row " + row.id + ": relation needs ==");
            row.relations.emplace_back(trim(rel.substr(0, pos)), trim(rel.substr(pos + 2)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Verdict verify_table1_row(const Table1Row& row, Exponent N, const Catalog& cat) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict out;
    out.id = row.id;
    out.order_used = N;
    out.matched = true;
    try {
        // every referenced id must resolve before any series work
        for (const auto& id : row.ids)
            if (!cat.find_resolved(id, nullptr))
                throw Error(Errc::UnresolvedReference, "table1 row " + row.id + " cites " + id);
        if (!row.product_text.empty()) {
            ExprPtr p = parse_expr(row.product_text);
            validate_expr(p);
            Series stated = eval_series(p, N, cat.resolver_context());
            for (const auto& id : row.ids) {
                Series prod = cat.eval_expr(id, 1, N);
                Verdict v = compare_series(stated, prod, N);
                if (v.order_used < out.order_used) out.order_used = v.order_used;
                if (!v.matched) {
                    out.matched = false;
                    out.first_mismatch = v.first_mismatch;
                    break;
                }
            }
        }
        for (const auto& [l, r] : row.relations) {
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
    out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

BatchReport verify_table1(const std::vector<Table1Row>& rows, Exponent N, const Catalog& cat) {
    BatchReport rep;
    for (const auto& row : rows) rep.add(verify_table1_row(row, N, cat));
    rep.sort_by_id();
    return rep;
}

} // namespace qidforge
