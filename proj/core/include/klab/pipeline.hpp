#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "klab/basis.hpp"
#include "klab/cone.hpp"
#include "klab/deadend.hpp"
#include "klab/koethe.hpp"
#include "klab/operator.hpp"

namespace klab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

struct Tolerances {
    double tau_rank = 1e-10;
    double tau_orth = 1e-9;
    double tau_cone = 1e-12;
};

struct PipelineConfig {
    Json matrix_spec;
    Json operator_spec;
    Tolerances tol;
    std::vector<std::size_t> cone_grades;       // empty: every valid r
    std::vector<std::size_t> truncation_levels; // empty: {N}
    std::size_t samples = 1000;
    std::uint64_t seed = 1;

    static PipelineConfig parse(const Json& j);
    static PipelineConfig demo();
    Json to_json() const;
};

/// Matrix loader for the declarative specs:
///   {"grid": [...], "K": k, "N": n}
///   {"family": "power", "exponents": [...], "N": n}       a_{k,n} = n^{e_k}
///   {"family": "geometric", "base": b, "exponents": [...], "N": n}
///                                                         a_{k,n} = b^{e_k n}
KoetheMatrix matrix_from_spec(const Json& spec);

/// Operator loader:
///   {"grid": [...]}
///   {"family": "coordinate-projection", "coords": [...]}
///   {"family": "random-nonneg", "density": d, "seed": s}
OperatorMatrix operator_from_spec(const Json& spec, std::size_t N);

enum class PipelineMode { Verify, Basis, Full };

struct PipelineResult {
    Json report;
    bool pass = false;
};

/// Error raised inside a pipeline stage, labelled with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

PipelineResult run_pipeline(const PipelineConfig& cfg, PipelineMode mode);

/// Write the tabular plot series (lambda decay, endpoint-ratio-vs-n,
/// C(r)-vs-truncation) into `out_dir`. Returns the file names written.
std::vector<std::string> emit_plot_data(const Json& report, const std::string& out_dir);

/// Human-readable rendering of the report.
std::string render_text(const Json& report);

} // namespace klab
