#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "meroasian/pricing.hpp"
#include "meroasian/roots.hpp"

namespace meroasian::cli {

// Parses argv, dispatches to price | density | roots | mellin | compare and
// writes the result to `out` (or --output). Returns 0 on success, 2 on usage
// errors (message names the flag) and 1 on numerical failures (message names
// the error kind). Messages go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Fixed-schema emitters; floats carry 9 significant digits.
std::string format_number(double x);
std::string price_json(const PricingResult& result);
std::string density_csv(const DensityCurve& curve);
std::string roots_csv(const RootSet& roots);
std::string mellin_json(cplx value, const MellinEval& eval);

struct CompareRow {
    int N = 0;
    double algo1_price = 0.0;
    double algo1_time = 0.0;
    double algo2_price = 0.0;
    double algo2_time = 0.0;
};
std::string compare_csv(const std::vector<CompareRow>& rows, bool omit_timing);

}  // namespace meroasian::cli
