#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mapsparse/error.hpp"
#include "mapsparse/map_model.hpp"
#include "json_fields.hpp"
#include "text_util.hpp"

namespace mapsparse {
namespace {

using nlohmann::json;
using namespace detail::json_fields;

void appendVec(std::string& out, std::initializer_list<double> values) {
  out += '[';
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    detail::appendDouble(out, v);
    first = false;
  }
  out += ']';
}

}  // namespace

Map parseMap(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document: expected an object");

  std::vector<CameraModel> cameras;
  const json& jc = array(doc, "cameras");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string w = at("cameras", i);
    CameraModel c;
    c.id = integer(jc[i], "id", w);
    c.fx = number(jc[i], "fx", w);
    c.fy = number(jc[i], "fy", w);
    c.cx = number(jc[i], "cx", w);
    c.cy = number(jc[i], "cy", w);
    c.width = static_cast<int>(integer(jc[i], "width", w));
    c.height = static_cast<int>(integer(jc[i], "height", w));
    cameras.push_back(c);
  }

  std::vector<Keyframe> keyframes;
  const json& jk = array(doc, "keyframes");
  for (std::size_t i = 0; i < jk.size(); ++i) {
    const std::string w = at("keyframes", i);
    Keyframe kf;
    kf.id = integer(jk[i], "id", w);
    kf.camera_id = integer(jk[i], "camera_id", w);
    const Eigen::Vector4d q = vec<4>(jk[i], "q", w);
    kf.pose.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
    kf.pose.translation = vec<3>(jk[i], "t", w);
    keyframes.push_back(kf);
  }

  std::vector<Landmark> landmarks;
  const json& jl = array(doc, "landmarks");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string w = at("landmarks", i);
    Landmark lm;
    lm.id = integer(jl[i], "id", w);
    lm.position = vec<3>(jl[i], "p", w);
    lm.match_count = integer(jl[i], "match_count", w);
    landmarks.push_back(lm);
  }

  std::vector<Observation> observations;
  const json& jo = array(doc, "observations");
  for (std::size_t i = 0; i < jo.size(); ++i) {
    const std::string w = at("observations", i);
    Observation ob;
    ob.keyframe_id = integer(jo[i], "kf", w);
    ob.landmark_id = integer(jo[i], "lm", w);
    ob.pixel = {number(jo[i], "u", w), number(jo[i], "v", w)};
    observations.push_back(ob);
  }

  Map::Metadata metadata;
  if (auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("metadata: expected an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) {
        throw ParseError("metadata." + key + ": expected a string");
      }
      metadata[key] = value.get<std::string>();
    }
  }

  return Map::build(std::move(cameras), std::move(keyframes),
                    std::move(landmarks), std::move(observations),
                    std::move(metadata));
}

Map loadMap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open map file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseMap(ss.str());
}

std::string serializeMap(const Map& map) {
  std::string out;
  out.reserve(128 * (map.numLandmarks() + map.numObservations()) + 1024);
  out += "{\n\"cameras\":[";
  bool first = true;
  for (const auto& c : map.cameras()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "{\"id\":" + std::to_string(c.id) + ",\"fx\":";
    detail::appendDouble(out, c.fx);
    out += ",\"fy\":";
    detail::appendDouble(out, c.fy);
    out += ",\"cx\":";
    detail::appendDouble(out, c.cx);
    out += ",\"cy\":";
    detail::appendDouble(out, c.cy);
    out += ",\"width\":" + std::to_string(c.width) +
           ",\"height\":" + std::to_string(c.height) + "}";
  }
  out += "\n],\n\"keyframes\":[";
  first = true;
  for (const auto& kf : map.keyframes()) {
    out += first ? "\n" : ",\n";
    first = false;
    const auto& q = kf.pose.rotation;
    const auto& t = kf.pose.translation;
    out += "{\"id\":" + std::to_string(kf.id) +
           ",\"camera_id\":" + std::to_string(kf.camera_id) + ",\"q\":";
    appendVec(out, {q.w(), q.x(), q.y(), q.z()});
    out += ",\"t\":";
    appendVec(out, {t.x(), t.y(), t.z()});
    out += "}";
  }
  out += "\n],\n\"landmarks\":[";
  first = true;
  for (const auto& lm : map.landmarks()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "{\"id\":" + std::to_string(lm.id) + ",\"p\":";
    appendVec(out, {lm.position.x(), lm.position.y(), lm.position.z()});
    out += ",\"match_count\":" + std::to_string(lm.match_count) + "}";
  }
  out += "\n],\n\"observations\":[";
  first = true;
  for (const auto& ob : map.observations()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "{\"kf\":" + std::to_string(map.keyframes()[ob.keyframe].id) +
           ",\"lm\":" + std::to_string(map.landmarks()[ob.landmark].id) +
           ",\"u\":";
    detail::appendDouble(out, ob.pixel.x());
    out += ",\"v\":";
    detail::appendDouble(out, ob.pixel.y());
    out += "}";
  }
  out += "\n]";
  if (!map.metadata().empty()) {
    out += ",\n\"metadata\":";
    out += nlohmann::json(map.metadata()).dump();
  }
  out += "\n}\n";
  return out;
}

void saveMap(const Map& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write map file " + path.string());
  out << serializeMap(map);
  if (!out) throw IoError("failed writing map file " + path.string());
}

}  // namespace mapsparse
