#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "q3p/emulator.hpp"
#include "q3p/field.hpp"
#include "q3p/ising.hpp"
#include "q3p/pulse.hpp"
#include "q3p/register.hpp"
#include "q3p/vqa.hpp"

// JSON and CSV forms of the pipeline artifacts. Readers throw ParseError
// naming the source.
namespace q3p {

using nlohmann::json;

json components_to_json(const std::vector<GaussianComponent>& components);
std::vector<GaussianComponent> components_from_json(const json& j);

json register_to_json(const Register& reg);
Register register_from_json(const json& j);

json problem_to_json(const PlacementProblem& problem);
PlacementProblem problem_from_json(const json& j);

json waveform_to_json(const Waveform& w);
Waveform waveform_from_json(const json& j);
json pulse_to_json(const PulseProgram& pulse);
PulseProgram pulse_from_json(const json& j);

json placement_to_json(const Placement& placement);

json noise_to_json(const NoiseModel& noise);
// Missing keys keep their zero defaults; {"preset": "hardware"} starts from
// the hardware fit.
NoiseModel noise_from_json(const json& j);

json cycle_to_json(const CycleRecord& record);
CycleRecord cycle_from_json(const json& j);

// "bitstring,count" rows, highest count first.
void write_histogram_csv(const SampleHistogram& histogram, std::ostream& out);
SampleHistogram read_histogram_csv(std::istream& in, const std::string& source = "<csv>");
json histogram_to_json(const SampleHistogram& histogram);
SampleHistogram histogram_from_json(const json& j);

// First row: "delta\\T" followed by the durations; then one row per detuning.
void write_landscape_csv(const Landscape& landscape, std::ostream& out);
Landscape read_landscape_csv(std::istream& in, const std::string& source = "<csv>");

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& j, const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::string& text, const std::filesystem::path& path);

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace q3p
