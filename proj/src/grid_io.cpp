#include "q3p/grid_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "q3p/error.hpp"

namespace q3p {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  for (std::string t; ss >> t;) tokens.push_back(t);
  return tokens;
}

bool parse_double(const std::string& token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_size(const std::string& token, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Position of `key` in tokens, or tokens.size().
std::size_t find_token(const std::vector<std::string>& tokens, const std::string& key) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == key) return i;
  }
  return tokens.size();
}

}  // namespace

GridFormat grid_format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".dx") return GridFormat::kDx;
  if (ext == ".json") return GridFormat::kJson;
  throw InvalidArgument("cannot infer grid format from extension of " + path.string());
}

ScalarField read_dx(std::istream& in, const std::string& source) {
  std::vector<std::size_t> counts;
  std::vector<double> origin;
  std::vector<std::vector<double>> deltas;
  std::size_t declared_items = 0;
  bool in_data = false;
  bool data_done = false;
  std::vector<double> values;
  std::size_t line_no = 0;

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].starts_with('#')) continue;

    if (in_data) {
      double v = 0.0;
      if (parse_double(tokens[0], v)) {
        for (const auto& t : tokens) {
          if (!parse_double(t, v)) throw ParseError(source, line_no, "invalid data value '" + t + "'");
          values.push_back(v);
        }
        continue;
      }
      in_data = false;
      data_done = true;
    }

    if (data_done) {
      if (tokens[0] == "attribute" || tokens[0] == "object" || tokens[0] == "component") continue;
      throw ParseError(source, line_no, "unexpected content after data block");
    }

    if (tokens[0] == "object") {
      const auto cls = find_token(tokens, "class");
      if (cls + 1 >= tokens.size()) throw ParseError(source, line_no, "object line without class");
      const auto& kind = tokens[cls + 1];
      if (kind == "gridpositions" || kind == "gridconnections") {
        const auto at = find_token(tokens, "counts");
        if (at == tokens.size() || tokens.size() != at + 4) throw ParseError(source, line_no, "expected three grid counts");
        std::vector<std::size_t> c(3);
        for (std::size_t a = 0; a < 3; ++a) {
          if (!parse_size(tokens[at + 1 + a], c[a]) || c[a] == 0) {
            throw ParseError(source, line_no, "invalid grid count '" + tokens[at + 1 + a] + "'");
          }
        }
        if (kind == "gridpositions") {
          counts = c;
        } else if (!counts.empty() && c != counts) {
          throw ParseError(source, line_no, "gridconnections counts disagree with gridpositions");
        }
      } else if (kind == "array") {
        if (counts.empty() || origin.empty() || deltas.size() != 3) {
          throw ParseError(source, line_no, "data array before complete grid header");
        }
        const auto items = find_token(tokens, "items");
        if (items + 1 < tokens.size() && !parse_size(tokens[items + 1], declared_items)) {
          throw ParseError(source, line_no, "invalid item count");
        }
        if (tokens.size() < 2 || tokens[tokens.size() - 2] != "data" || tokens.back() != "follows") {
          throw ParseError(source, line_no, "array header must end with 'data follows'");
        }
        in_data = true;
      } else {
        throw ParseError(source, line_no, "unsupported object class '" + kind + "'");
      }
    } else if (tokens[0] == "origin") {
      if (tokens.size() != 4) throw ParseError(source, line_no, "origin needs three coordinates");
      origin.resize(3);
      for (std::size_t a = 0; a < 3; ++a) {
        if (!parse_double(tokens[1 + a], origin[a])) {
          throw ParseError(source, line_no, "invalid origin coordinate '" + tokens[1 + a] + "'");
        }
      }
    } else if (tokens[0] == "delta") {
      if (tokens.size() != 4) throw ParseError(source, line_no, "delta needs three components");
      if (deltas.size() == 3) throw ParseError(source, line_no, "more than three delta lines");
      std::vector<double> d(3);
      for (std::size_t a = 0; a < 3; ++a) {
        if (!parse_double(tokens[1 + a], d[a])) {
          throw ParseError(source, line_no, "invalid delta component '" + tokens[1 + a] + "'");
        }
      }
      const std::size_t axis = deltas.size();
      for (std::size_t a = 0; a < 3; ++a) {
        if (a != axis && d[a] != 0.0) {
          throw ParseError(source, line_no, "only axis-aligned delta vectors are supported");
        }
      }
      if (!(d[axis] > 0.0)) throw ParseError(source, line_no, "grid spacing must be positive");
      deltas.push_back(d);
    } else {
      throw ParseError(source, line_no, "unrecognized header line '" + tokens[0] + "'");
    }
  }

  if (counts.empty()) throw ParseError(source, 0, "missing gridpositions header");
  if (!in_data && !data_done) throw ParseError(source, 0, "missing data array");
  const std::size_t expected = counts[0] * counts[1] * counts[2];
  if (declared_items != 0 && declared_items != expected) {
    throw ParseError(source, 0,
                     "array declares " + std::to_string(declared_items) + " items but counts imply " +
                         std::to_string(expected));
  }
  if (values.size() != expected) {
    throw ParseError(source, line_no,
                     "shape mismatch: counts imply " + std::to_string(expected) + " values, found " +
                         std::to_string(values.size()));
  }
  GridGeometry geometry{counts, {deltas[0][0], deltas[1][1], deltas[2][2]}, origin};
  return ScalarField(std::move(geometry), std::move(values));
}

void write_dx(const ScalarField& field, std::ostream& out) {
  if (field.dims() != 3) throw InvalidArgument("dx output requires a 3D field");
  const auto& s = field.shape();
  const auto& h = field.spacing();
  const auto& o = field.origin();
  out << "# q3p grid\n";
  out << "object 1 class gridpositions counts " << s[0] << ' ' << s[1] << ' ' << s[2] << '\n';
  out << "origin " << format_double(o[0]) << ' ' << format_double(o[1]) << ' '
      << format_double(o[2]) << '\n';
  out << "delta " << format_double(h[0]) << " 0 0\n";
  out << "delta 0 " << format_double(h[1]) << " 0\n";
  out << "delta 0 0 " << format_double(h[2]) << '\n';
  out << "object 2 class gridconnections counts " << s[0] << ' ' << s[1] << ' ' << s[2] << '\n';
  out << "object 3 class array type double rank 0 items " << field.size() << " data follows\n";
  const auto values = field.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_double(values[i]) << ((i % 3 == 2 || i + 1 == values.size()) ? '\n' : ' ');
  }
  out << "attribute \"dep\" string \"positions\"\n";
  out << "object \"regular positions regular connections\" class field\n";
  out << "component \"positions\" value 1\n";
  out << "component \"connections\" value 2\n";
  out << "component \"data\" value 3\n";
}

nlohmann::json frame_to_json(const SliceFrame& frame) {
  return {{"origin", frame.origin}, {"u", frame.u}, {"v", frame.v}};
}

SliceFrame frame_from_json(const nlohmann::json& j) {
  SliceFrame f;
  f.origin = j.at("origin").get<Vec3>();
  f.u = j.at("u").get<Vec3>();
  f.v = j.at("v").get<Vec3>();
  return f;
}

ScalarField field_from_json(const nlohmann::json& j, const std::string& source) {
  try {
    const auto dims = j.at("dims").get<std::size_t>();
    GridGeometry geometry{j.at("shape").get<std::vector<std::size_t>>(),
                          j.at("spacing").get<std::vector<double>>(),
                          j.at("origin").get<std::vector<double>>()};
    if (geometry.dims() != dims) {
      throw ParseError(source, 0, "dims disagrees with the length of shape");
    }
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != geometry.point_count()) {
      throw ParseError(source, 0,
                       "shape mismatch: shape implies " + std::to_string(geometry.point_count()) +
                           " values, found " + std::to_string(values.size()));
    }
    std::optional<SliceFrame> frame;
    if (j.contains("frame") && !j.at("frame").is_null()) frame = frame_from_json(j.at("frame"));
    return ScalarField(std::move(geometry), std::move(values), frame);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(source, 0, e.what());
  }
}

nlohmann::json field_to_json(const ScalarField& field) {
  nlohmann::json j = {{"dims", field.dims()},
                      {"shape", field.shape()},
                      {"spacing", field.spacing()},
                      {"origin", field.origin()},
                      {"values", std::vector<double>(field.values().begin(), field.values().end())}};
  if (field.frame()) j["frame"] = frame_to_json(*field.frame());
  return j;
}

ScalarField load_grid(const std::filesystem::path& path, GridFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid file " + path.string());
  if (format == GridFormat::kDx) return read_dx(in, path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, std::string("byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  return field_from_json(j, path.string());
}

ScalarField load_grid(const std::filesystem::path& path) {
  return load_grid(path, grid_format_from_path(path));
}

void save_grid(const ScalarField& field, const std::filesystem::path& path, GridFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write grid file " + path.string());
  if (format == GridFormat::kDx) {
    write_dx(field, out);
  } else {
    out << field_to_json(field).dump() << '\n';
  }
}

void save_grid(const ScalarField& field, const std::filesystem::path& path) {
  save_grid(field, path, grid_format_from_path(path));
}

}  // namespace q3p
