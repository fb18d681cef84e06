#ifndef RECUR_JSON_IO_HPP
#define RECUR_JSON_IO_HPP

#include "recur/bohr.hpp"
#include "recur/dynamics.hpp"
#include "recur/ks.hpp"
#include "recur/setspec.hpp"
#include "recur/torus.hpp"
#include "recur/windowed.hpp"

#include <json.hpp>

#include <string>

namespace recur {

using Json = nlohmann::json;

std::string rational_string(const Rational& q);
Rational parse_rational(const Json& j);  // accepts "p/q", decimal strings, integers

Json to_json(const FrequencyVector& fv);
FrequencyVector frequency_vector_from_json(const Json& j);

Json to_json(const Frequencies& f);
Frequencies frequencies_from_json(const Json& j);

Json to_json(const WindowedSet& s);
WindowedSet windowed_set_from_json(const Json& j);

Json to_json(const BohrSpec& s);
BohrSpec bohr_spec_from_json(const Json& j);

Json to_json(const BohrHammingSpec& s);
BohrHammingSpec bh_spec_from_json(const Json& j);

Json to_json(const SetSpec& s);
SetSpec set_spec_from_json(const Json& j);

Json to_json(const RotationSystem& s);
RotationSystem rotation_system_from_json(const Json& j);

Json to_json(const BoxSet& d, const RotationSystem& sys);
BoxSet box_set_from_json(const Json& j);

Json to_json(const PipelineReport& report);

// Reads a file into a Json value; throws ValidationError with the path on
// parse failure.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace recur

#endif
