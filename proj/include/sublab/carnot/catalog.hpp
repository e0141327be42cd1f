#pragma once

#include "sublab/carnot/group.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sublab::carnot {

/// Heisenberg group, layers (2,1), [X1,X2] = X3.
GroupSpec heisenberg();
/// Engel group, layers (2,1,1), [X1,X2] = X3, [X1,X3] = X4.
GroupSpec engel();
/// Free step-2 group on 3 generators, layers (3,3).
GroupSpec free_step2_rank3();
/// Abelian R^n (step 1).
GroupSpec euclidean(int n);

/// Lookup by name: "heisenberg", "engel", "free3-step2", "euclidean<n>".
GroupSpec group_by_name(const std::string& name);
std::vector<std::string> catalog_names();

/// Custom spec from {"name": ..., "step": r, "layer_dims": [...],
/// "brackets": [[i, j, k, c], ...]} with 1-based basis indices.
GroupSpec group_from_json(const nlohmann::json& doc);
GroupSpec group_from_json_file(const std::string& path);

}  // namespace sublab::carnot
