#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "covqec/bounds.hpp"
#include "covqec/codes.hpp"
#include "covqec/recovery.hpp"

namespace covqec {

using nlohmann::json;

// Malformed or inconsistent input documents.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Matrices travel row-major as a flat list of [re, im] pairs. Readers also
// accept nested rows and bare real entries.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j, int rows, int cols);

json channel_to_json(const Channel& ch);
Channel channel_from_json(const json& j);

// Emits the traceless (shifted) matrix.
json hamiltonian_to_json(const Hamiltonian& h);
Hamiltonian hamiltonian_from_json(const json& j);

// A code document is either a thermo spec or an explicit covariant code.
struct CodeDocument {
  std::optional<ThermoCodeSpec> thermo;
  std::optional<CovariantCode> code;
};
json code_to_json(const CodeDocument& doc);
CodeDocument code_from_json(const json& j);

json qfi_to_json(const QfiValue& q, const std::string& kind_label = "");
json bound_report_to_json(const BoundReport& r);
json estimate_to_json(const InfidelityEstimate& e);

// name:dim:p with name in identity, erasure, depolarizing, dephasing; dephasing
// also accepts name:2:p:phi for a rotated dephasing channel.
Channel parse_channel_shorthand(const std::string& text);
// A shorthand, or a path to a channel JSON file.
Channel load_channel(const std::string& arg);
// "sz" is diag(d-1, d-3, ..., 1-d); "zero" and "diag:a,b,..." are also
// understood; anything else is read as a Hamiltonian JSON file.
Hamiltonian load_hamiltonian(const std::string& arg, int d);
CodeDocument load_code(const std::string& arg);

json read_json_file(const std::string& path);

} // namespace covqec
