#pragma once

#include <string>

#include "jgecert/bounds.hpp"
#include "jgecert/metrics.hpp"

namespace jgecert {

/// Version of the JSON layout written by the functions below.
inline constexpr int kSchemaVersion = 1;

// JSON documents (pretty-printed with `indent` spaces, compact when indent < 0).
// Doubles are written by the JSON library in shortest round-trip form.
std::string spectrum_to_json(const Spectrum& s, int indent = 2);
std::string report_to_json(const BoundReport& r, int indent = 2);
std::string certificate_to_json(const MeasuredCertificate& c, int indent = 2);
std::string pencil_epsilon_to_json(const PencilEpsilon& p, int indent = 2);

}  // namespace jgecert
