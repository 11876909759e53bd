#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace mdh::cli {

using Json = nlohmann::ordered_json;

// Pretty-prints with every double written as %.17g so values survive a
// round trip exactly; non-finite doubles become null.
void write_json(std::ostream& out, const Json& value, int indent = 2);
std::string to_json_text(const Json& value);

}  // namespace mdh::cli
