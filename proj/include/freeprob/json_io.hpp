#pragma once

#include <string>

#include "freeprob/distribution.hpp"
#include "freeprob/divisibility.hpp"
#include "freeprob/inversion.hpp"
#include "freeprob/ncseries.hpp"
#include "freeprob/transforms.hpp"
#include "json.hpp"

namespace freeprob {

using Json = nlohmann::json;

// Wire formats. Matrices are split into real and imaginary parts; level
// matrices use nested row-major arrays, multilinear coefficients and CP map
// operators use flat row-major arrays. All loaders throw ParseError on
// malformed input, including wrong dimensions and missing keys.

// {"d", "n", "re": [[...]], "im": [[...]]}
Json to_json(const LevelMatrix& b);
LevelMatrix level_from_json(const Json& j);

// {"ell", "re": [...], "im": [...]}
Json to_json(const MultilinearMap& T);
MultilinearMap map_from_json(const Json& j, int d);

// {"d", "L", "coeffs": [coefficient...]}; a stated tail bound rides along.
Json to_json(const NCSeries& s);
NCSeries series_from_json(const Json& j);

// {"d", "L", "M", "moments": [...], "cumulants": [...],
//  "realization": {"m", "a_re", "a_im"} when available}. Loading accepts
// either moment or cumulant lists and derives the missing one; a stored
// realization restores the exact resolvent backend.
Json to_json(const Distribution& mu);
Distribution distribution_from_json(const Json& j);

// {"d", "op_re", "op_im"}
Json to_json(const CPMap& rho);
CPMap cpmap_from_json(const Json& j);

Json to_json(const CauchyReport& rep);
Json to_json(const AsymptoticsReport& rep);
Json to_json(const Sigma0Report& rep);
Json to_json(const VoiculescuReport& rep);
Json to_json(const DivisibilityReport& rep);
Json to_json(const PhiExtensionReport& rep);
// Non-finite uniqueness radii serialize as null.
Json to_json(const KantorovichCertificate& cert);

// File round trip; read and write failures surface as ParseError.
Json load_json(const std::string& path);
void save_json(const Json& j, const std::string& path, int indent = 2);

}  // namespace freeprob
