#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "graver_opt/augment.hpp"
#include "graver_opt/models.hpp"
#include "graver_opt/nfold.hpp"
#include "graver_opt/objective.hpp"
#include "graver_opt/twostage.hpp"

namespace graver_opt {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Integers are JSON integers or decimal strings; rationals are integers or
// "p/q" strings. Floating-point numbers are rejected.
Int int_from_json(const Json& j);
Rat rat_from_json(const Json& j);
Json to_json(const Int& x);
Json to_json(const Rat& q);
IntVec int_vec_from_json(const Json& j);
RatVec rat_vec_from_json(const Json& j);
Json to_json(std::span<const Int> v);
Json to_json(std::span<const Rat> v);
IntMat int_mat_from_json(const Json& j, std::size_t cols);
Json to_json(const IntMat& m);

Univariate univariate_from_json(const Json& j);
Json to_json(const Univariate& f);

// {"kind": "linear", "c": [...]} or {"kind": "composite", "c": [...], "rows": [{"coeffs", "f"}]}.
Objective objective_from_json(const Json& j, std::size_t dim);
Json to_json(const Objective& obj);

struct InstanceDocument {
  int format_version = kFormatVersion;
  std::string kind;  // ip, lp, nfold, twostage, transportation, table3, hierarchical, decode
  Json payload = Json::object();
  Json objective = Json::object();
  Json meta = Json::object();  // informational, e.g. the source model of a translation
};

// Throws kParse on malformed documents.
InstanceDocument parse_document(const Json& j);
InstanceDocument parse_document_text(const std::string& text);
Json to_json(const InstanceDocument& doc);

// Structured views of a document; each throws kParse on schema errors.
FeasibleBox box_from_document(const InstanceDocument& doc);  // ip, lp
NFoldInstance nfold_from_document(const InstanceDocument& doc);  // nfold and the model kinds except decode
TwoStageInstance twostage_from_document(const InstanceDocument& doc);
DecodingSpec decoding_from_document(const InstanceDocument& doc);
MarginSpec margins_from_document(const InstanceDocument& doc);

InstanceDocument nfold_document(const NFoldInstance& inst, Json meta = Json::object());
InstanceDocument twostage_document(const TwoStageInstance& inst);
InstanceDocument ip_document(const FeasibleBox& box, const Objective& obj, bool lp = false);

// Model kinds to their nfold document (q recorded in meta for decode with
// p = infinity); an nfold document is returned unchanged.
InstanceDocument translate_model(const InstanceDocument& doc);

struct RunFlags {
  std::optional<std::string> mode;  // ip or lp, for ip/lp documents
  bool trace = false;
  unsigned threads = 1;
  std::size_t graver_cap = 6;
  std::size_t direct_threshold = 24;
  std::size_t block_cap = 4;
  std::uint64_t cell_cap = 10'000'000;  // oracle
  std::optional<Int> radius;             // oracle
};

enum ExitCode { kExitOptimal = 0, kExitError = 1, kExitInfeasible = 2, kExitUnbounded = 3, kExitSearchSpace = 4 };

struct RunOutcome {
  Json document;
  int exit_code = kExitOptimal;
};

// ResultDocument: status, point, value, optional trace, stats. An optimal point
// is re-verified against the constraints and the reported value before it is
// returned; a failed check becomes an error outcome.
RunOutcome run_solve(const InstanceDocument& doc, const RunFlags& flags = {});
RunOutcome run_oracle(const InstanceDocument& doc, const RunFlags& flags = {});

enum class BasisKind { kCircuits, kGraver, kComposite };
RunOutcome run_basis(const InstanceDocument& doc, BasisKind kind, const RunFlags& flags = {});

RunOutcome run_model(const InstanceDocument& doc);

// The document without stats.wall_ms, for comparisons across runs.
Json without_wall_ms(Json result);

}  // namespace graver_opt
