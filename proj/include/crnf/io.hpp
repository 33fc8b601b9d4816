#pragma once

#include "crnf/hypersurface.hpp"
#include "crnf/ode.hpp"
#include "crnf/segre.hpp"

#include "json.hpp"

#include <string>

namespace crnf {

// Canonical JSON: object keys keep insertion order, rationals are "p/q"
// strings (plain "p" for integers) and complex numbers are [re, im] pairs.
using Json = nlohmann::ordered_json;

std::string rational_string(const mpq_class& q);
// Parses "p", "p/q" or "-p/q"; throws ValidationError.
mpq_class parse_rational(const std::string& s);

Json to_json(const GaussRat& c);
GaussRat gauss_from_json(const Json& j);

// {"vars": [...], "order": n, "terms": [{"exponents": [...], "re": "p/q", "im": "p/q"}, ...]},
// terms sorted lexicographically by exponents.
Json to_json(const MultiSeries& s);
MultiSeries series_from_json(const Json& j);
// Term records only (the "terms" array above).
Json term_records(const MultiSeries& s);
MultiSeries series_from_records(const Json& records, const std::vector<std::string>& vars, int order);

// {"m", "eps", "order", "h": {"k,l": [[re, im], ...]}}: u-coefficients of
// h_kl from degree 0 up to the last nonzero one, keys ordered by (k, l).
Json to_json(const RealHypersurface& h);
RealHypersurface hypersurface_from_json(const Json& j);

// {"m", "eps", "order", "phi": {"k,l": [...]}} with coefficients in w.
Json to_json(const ExponentialForm& e);
ExponentialForm exponential_from_json(const Json& j);

// {"m", "sign", "order", "phi": {"k,l": [...]}} with coefficients in eta.
Json to_json(const SegreFamily& s);
SegreFamily segre_from_json(const Json& j);

// {"m", "order", "phi": [term records in (z, w, zeta)]}.
Json to_json(const SingularODE& e);
SingularODE ode_from_json(const Json& j);

// {"f0": [...], "f1": [...], "g0": [...], "g1": [...]}: w-coefficients from
// degree 0, each list ending at the last nonzero entry.
Json to_json(const CauchyData& y);
CauchyData cauchy_from_json(const Json& j, int order);

enum class DocumentKind { kHypersurface, kExponential, kSegre, kODE };
// Kind of an input document, read from its keys; throws ValidationError.
DocumentKind document_kind(const Json& j);

// Serialized text: two-space indentation and a trailing newline.
std::string dump(const Json& j);

} // namespace crnf
