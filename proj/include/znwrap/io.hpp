#pragma once

#include <string>

#include "znwrap/group.hpp"
#include "znwrap/wrapper.hpp"

namespace znwrap {

/// Canonical set JSON: {"N": n, "residues": [ascending]} for N <= 4096,
/// {"N": n, "bits_hex": "..."} above (little-endian bit string: byte j
/// holds residues 8j..8j+7, bit k of the byte = residue 8j+k, lowercase
/// hex).  Loading accepts either form at any N.
std::string set_to_json(const GroupSet& s);
GroupSet set_from_json(const std::string& text);

/// CLI sugar: a path to a JSON file, an inline JSON object ("{...}"), or
/// "N:r1,r2,..." (e.g. "101:1,5,9").
GroupSet load_set_spec(const std::string& spec);

/// Wrapper JSON: {"N", "epsilon", "K", "characters", "coefficients"
/// ([{im, re}]), "signatures" ([[i_1..i_d]])}.  Signatures of blocks that
/// are empty in Z_N vanish on load (they never affect materialization).
std::string wrapper_to_json(const Wrapper& w);
Wrapper wrapper_from_json(const std::string& text);

}  // namespace znwrap
