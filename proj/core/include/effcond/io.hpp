#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "effcond/canonical_rep.hpp"
#include "effcond/laminate_models.hpp"
#include "effcond/recovery.hpp"

namespace effcond::io {

using nlohmann::json;

// Geometry from JSON {"n", "chi", optional "mirror": int | "auto"} or from an
// ASCII grid of '0'/'1' rows. `fallback` applies when no mirror key is given.
GridGeometry parse_geometry(const std::string &text, MirrorSpec fallback = {});
GridGeometry read_geometry(const std::string &path, MirrorSpec fallback = {});
json to_json(const GridGeometry &geom);

// "re", "re+imj", "imj"; also accepts "i" as the imaginary unit.
cplx parse_complex(const std::string &s);
// "a11,a12,a21,a22", row-major.
Tensor2 parse_tensor(const std::string &s);
// [[a11, a12], [a21, a22]] with entries as numbers, [re, im] or strings.
Tensor2 tensor_from_json(const json &j);
json to_json(const Tensor2 &t); // {"re": [[..]], "im": [[..]]}
json to_json(cplx z);           // [re, im]

json to_json(const CanonicalRep &rep);
CanonicalRep rep_from_json(const json &j);

LaminateProgram laminate_from_json(const json &j);

std::vector<SpectralSample> parse_samples_csv(const std::string &text);

// Deterministic serialization: doubles printed with 17 significant digits.
std::string dump(const json &j, int indent = 2);

std::string read_file(const std::string &path);
// Writes to a temporary sibling and renames over the target.
void write_file_atomic(const std::string &path, const std::string &content);

// 64-bit FNV-1a as 16 hex digits.
std::string hash_hex(const std::string &bytes);
std::string geometry_hash(const GridGeometry &geom);

} // namespace effcond::io
