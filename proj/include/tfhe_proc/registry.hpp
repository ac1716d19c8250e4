#pragma once

#include <map>
#include <string>
#include <vector>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/io.hpp"
#include "tfhe_proc/params.hpp"

namespace tfhe_proc {

/// Named parameter sets: the two built-ins plus any loaded from a config file
/// of the form {"param_sets": {"name": {<params fields>}, ...}}. Omitted fields
/// take the standard set's values.
class ParamSetRegistry {
 public:
  ParamSetRegistry() {
    sets_["standard"] = standard_params();
    sets_["large"] = large_params();
  }

  void add(const std::string& name, const TfheParams& p) {
    p.validate();
    sets_[name] = p;
  }

  void load_file(const std::string& path) {
    const io::json j = io::read_json_file(path);
    if (!j.is_object() || !j.contains("param_sets") || !j.at("param_sets").is_object()) {
      throw io::ParseError(path + ": expected an object with a 'param_sets' object");
    }
    for (const auto& [name, block] : j.at("param_sets").items()) {
      try {
        add(name, io::params_from_json(block));
      } catch (const InvalidArgument& e) {
        throw io::ParseError(path + ": parameter set '" + name + "': " + e.what());
      }
    }
  }

  bool contains(const std::string& name) const { return sets_.contains(name); }

  const TfheParams& get(const std::string& name) const {
    const auto it = sets_.find(name);
    if (it == sets_.end()) throw InvalidArgument("unknown parameter set '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, p] : sets_) out.push_back(name);
    return out;
  }

 private:
  std::map<std::string, TfheParams> sets_;
};

}  // namespace tfhe_proc
