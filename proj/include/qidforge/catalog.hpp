#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qidforge/ast.hpp"
#include "qidforge/eval.hpp"

namespace qidforge {

// One identity: two or more expressions asserted pairwise equal.  By
// convention expr 1 is the closed (product) side and expr 2 the first series.
struct IdentityRecord {
    std::string id;
    std::string section;
    std::optional<int> modulus;
    std::vector<std::string> expr_texts;
    std::vector<ExprPtr> exprs;
    std::string refs;
    std::string note;
    bool known_discrepancy = false;
    std::vector<std::string> aliases;
};

struct BatchReport {
    std::vector<Verdict> verdicts; // sorted by id
    int ok = 0, fail = 0, err = 0, allowlisted = 0, unresolved = 0, skipped = 0;

    void add(Verdict v, bool excused = false);
    void merge(const BatchReport& other);
    void sort_by_id();
    // "ID<TAB>STATUS<TAB>N<TAB>first_mismatch_or_dash<TAB>millis" per line,
    // then "TOTAL ok=<k> fail=<m> err=<e>".
    std::string to_tsv(bool with_timings = true) const;
    bool all_ok() const { return fail == 0 && err == 0; }
};

// Generic key/value block of the data files:
//   [kind name]
//   key = value
struct DataBlock {
    std::string kind;
    std::string name;
    std::vector<std::pair<std::string, std::string>> fields;
    std::string file;
    int line = 0;

    std::string get(const std::string& key, const std::string& dflt = "") const;
    std::vector<std::string> get_all(const std::string& key) const;
    bool has(const std::string& key) const;
};

std::vector<DataBlock> read_blocks(const std::string& path);
std::vector<std::string> split_list(const std::string& s, char sep = ',');

// Directory containing the shipped data files: QIDFORGE_CATALOG when set,
// otherwise the source tree default.
std::string default_data_dir();

class Catalog {
public:
    // path: a .cat file or a directory whose *.cat files are all loaded
    static Catalog load(const std::string& path);
    static Catalog load_default();

    const std::vector<IdentityRecord>& records() const { return records_; }
    const IdentityRecord* find(const std::string& id) const;
    // find, resolving "S.n-" to S.n + (q -> -q) and "S.n" to "S.nc" when
    // only the corrected form is printed
    const IdentityRecord* find_resolved(const std::string& id, bool* negate) const;

    // evaluation of expression idx (1-based) of entry id; @expr resolver
    Series eval_expr(const std::string& id, int idx, Exponent N) const;
    EvalContext resolver_context() const;

private:
    std::vector<IdentityRecord> records_;
    std::map<std::string, std::size_t> index_; // ids and aliases
};

// Evaluates all expressions of the record at order N and compares pairwise.
Verdict verify_identity(const IdentityRecord& rec, Exponent N);
Verdict verify_identity(const IdentityRecord& rec, Exponent N, const Catalog& cat);

// id -> comment; lines "id<TAB>comment", '#' comments
std::map<std::string, std::string> load_allowlist(const std::string& path);

// Runs every record concurrently; allowlisted mismatches are excused.
BatchReport verify_all(const Catalog& cat, Exponent N,
                       const std::map<std::string, std::string>& allowlist,
                       int parallelism);

// Equality check between two table-language expressions (@expr refs allowed).
Verdict check_relation(const std::string& lhs_text, const std::string& rhs_text, Exponent N,
                       const Catalog& cat);

// A row of the equivalent-products table: either a stated product shared by
// several entries, or a linear relation among entries.
struct Table1Row {
    std::string id;
    std::string product_text;        // nonempty for product rows
    std::vector<std::string> ids;    // entries claimed equal to the product
    std::vector<std::pair<std::string, std::string>> relations; // lhs == rhs
    std::string note;
};

std::vector<Table1Row> load_table1(const std::string& path);
Verdict verify_table1_row(const Table1Row& row, Exponent N, const Catalog& cat);
BatchReport verify_table1(const std::vector<Table1Row>& rows, Exponent N, const Catalog& cat);

} // namespace qidforge
