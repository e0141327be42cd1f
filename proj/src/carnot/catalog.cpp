#include "sublab/carnot/catalog.hpp"

#include <fstream>
#include <stdexcept>

namespace sublab::carnot {

GroupSpec heisenberg() {
  return GroupSpec("heisenberg", {2, 1}, {{0, 1, 2, 1.0}});
}

GroupSpec engel() {
  return GroupSpec("engel", {2, 1, 1}, {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}});
}

GroupSpec free_step2_rank3() {
  return GroupSpec("free3-step2", {3, 3}, {{0, 1, 3, 1.0}, {0, 2, 4, 1.0}, {1, 2, 5, 1.0}});
}

GroupSpec euclidean(int n) {
  if (n < 1) throw std::invalid_argument("euclidean: dimension must be >= 1");
  return GroupSpec("euclidean" + std::to_string(n), {n}, {});
}

GroupSpec group_by_name(const std::string& name) {
  if (name == "heisenberg") return heisenberg();
  if (name == "engel") return engel();
  if (name == "free3-step2") return free_step2_rank3();
  if (name.rfind("euclidean", 0) == 0 && name.size() > 9) {
    try {
      return euclidean(std::stoi(name.substr(9)));
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::invalid_argument("unknown group: " + name);
}

std::vector<std::string> catalog_names() {
  return {"heisenberg", "engel", "free3-step2", "euclidean1", "euclidean2", "euclidean3"};
}

GroupSpec group_from_json(const nlohmann::json& doc) {
  if (!doc.contains("layer_dims") || !doc["layer_dims"].is_array())
    throw std::invalid_argument("custom group: layer_dims array required");
  std::vector<int> dims = doc["layer_dims"].get<std::vector<int>>();
  if (doc.contains("step") && doc["step"].get<int>() != static_cast<int>(dims.size()))
    throw std::invalid_argument("custom group: step does not match layer_dims");
  std::vector<Bracket> brackets;
  if (doc.contains("brackets")) {
    for (const auto& entry : doc["brackets"]) {
      if (!entry.is_array() || entry.size() != 4)
        throw std::invalid_argument("custom group: bracket entries are [i, j, k, c]");
      // 1-based indices in the file
      brackets.push_back({entry[0].get<int>() - 1, entry[1].get<int>() - 1,
                          entry[2].get<int>() - 1, entry[3].get<double>()});
    }
  }
  const std::string name = doc.value("name", std::string("custom"));
  return GroupSpec(name, std::move(dims), std::move(brackets));
}

GroupSpec group_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open group spec file: " + path);
  nlohmann::json doc;
  in >> doc;
  return group_from_json(doc);
}

}  // namespace sublab::carnot
