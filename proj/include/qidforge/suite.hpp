#pragma once

#include <ostream>

#include "qidforge/bailey.hpp"
#include "qidforge/catalog.hpp"
#include "qidforge/transforms.hpp"

namespace qidforge {

struct SuiteOptions {
    bool quick = false;
    int parallelism = 4;
    bool timings = false;
};

// The example pair fed through PBL / TBL / S1BL must land exactly on the
// catalog entries for the first Rogers-Ramanujan, Ramanujan-Slater, and
// Lebesgue-special-case identities.
BatchReport derivation_chain(const PairSet& pairs, const Catalog& cat, Exponent N);

// Dissections over m in {2..5} and x in {+-q^(1/2), +-q, +-q^(3/2)}.
BatchReport dissection_grid(Exponent N);

// Weierstrass instances from weierstrass.cat plus a randomized n = 3 grid.
BatchReport weierstrass_suite(const std::string& data_dir, Exponent N, bool with_random_grid);

// Runs every check family and streams reports; returns a process exit code.
int run_suite_all(const std::string& data_dir, const SuiteOptions& opts, std::ostream& os);

} // namespace qidforge
