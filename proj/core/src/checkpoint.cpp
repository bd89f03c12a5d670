#include "cdrl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdrl/errors.hpp"

namespace cdrl {

namespace {

using nlohmann::json;

json spec_to_json(const MlpSpec& spec) {
  json j;
  j["input_dim"] = spec.input_dim;
  j["hidden"] = json::array();
  for (const auto& h : spec.hidden) {
    j["hidden"].push_back(
        {h.width, h.activation == Activation::kRelu ? "relu" : "identity"});
  }
  j["heads"] = json::array();
  for (const auto& h : spec.heads) j["heads"].push_back({h.name, h.width});
  return j;
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<int>();
  for (const auto& h : j.at("hidden")) {
    const std::string act = h.at(1).get<std::string>();
    if (act != "relu" && act != "identity") {
      throw FormatError("checkpoint: unknown activation '" + act + "'");
    }
    spec.hidden.push_back({h.at(0).get<int>(), act == "relu"
                                                   ? Activation::kRelu
                                                   : Activation::kIdentity});
  }
  for (const auto& h : j.at("heads")) {
    spec.heads.push_back({h.at(0).get<std::string>(), h.at(1).get<int>()});
  }
  spec.validate();
  return spec;
}

json layout_to_json(const ParamLayout& layout) {
  json j = json::array();
  for (const auto& l : layout) j.push_back({l.name, l.rows, l.cols, l.has_bias});
  return j;
}

ParamLayout layout_from_json(const json& j) {
  ParamLayout layout;
  for (const auto& l : j) {
    layout.push_back({l.at(0).get<std::string>(), l.at(1).get<int>(),
                      l.at(2).get<int>(), l.at(3).get<bool>()});
  }
  return layout;
}

}  // namespace

void checkpoint_save(const std::string& path, const MlpSpec& spec,
                     const ParamSet& params) {
  spec.validate();
  if (!same_layout(params.layout, spec.layout())) {
    throw ShapeError("checkpoint_save: params layout does not match spec");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("checkpoint_save: cannot open '" + path + "'");

  json header;
  header["spec"] = spec_to_json(spec);
  header["layout"] = layout_to_json(params.layout);
  out << kCheckpointMagic << '\n' << kCheckpointVersion << '\n'
      << header.dump() << '\n';

  for (double v : params.data) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) {
      bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    out.write(bytes, 8);
  }
  out.flush();
  if (!out) throw FormatError("checkpoint_save: write failed for '" + path + "'");
}

NetworkCheckpoint checkpoint_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint_load: cannot open '" + path + "'");

  std::string magic, version_line, header_line;
  if (!std::getline(in, magic) || magic != kCheckpointMagic) {
    throw FormatError("checkpoint_load: bad magic in '" + path + "'");
  }
  if (!std::getline(in, version_line)) {
    throw FormatError("checkpoint_load: missing version line");
  }
  int version = 0;
  try {
    version = std::stoi(version_line);
  } catch (const std::exception&) {
    throw FormatError("checkpoint_load: malformed version line");
  }
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint_load: unsupported version " + version_line);
  }
  if (!std::getline(in, header_line)) {
    throw FormatError("checkpoint_load: missing header line");
  }

  NetworkCheckpoint ckpt;
  try {
    const json header = json::parse(header_line);
    ckpt.spec = spec_from_json(header.at("spec"));
    ckpt.params.layout = layout_from_json(header.at("layout"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint_load: bad header: ") + e.what());
  }
  if (!same_layout(ckpt.params.layout, ckpt.spec.layout())) {
    throw FormatError("checkpoint_load: layout does not match spec");
  }

  const std::size_t n = layout_size(ckpt.params.layout);
  std::string payload((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (payload.size() != n * 8) {
    std::ostringstream msg;
    msg << "checkpoint_load: payload is " << payload.size()
        << " bytes, expected " << n * 8;
    throw FormatError(msg.str());
  }
  ckpt.params.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(payload[i * 8 + b]))
              << (8 * b);
    }
    ckpt.params.data[i] = std::bit_cast<double>(bits);
  }
  return ckpt;
}

}  // namespace cdrl
