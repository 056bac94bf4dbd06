// Reference external clients for the line-delimited JSON protocol.
//
// Modes:
//   echo-zero  well-behaved client: midpoint-grid plan, zero predictions
//   op-zero    operator flavor: measure draws are not needed, sends zeros
//   bad-count  returns one point fewer than requested   -> PROTO_POINTCOUNT
//   bad-nan    returns a null prediction (NaN on the wire) -> PROTO_NONFINITE
//   bad-json   answers the plan with garbage             -> PROTO_MALFORMED

#include <nlohmann/json.hpp>

#include <iostream>
#include <string>

#include "gapbench/baselines.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "echo-zero";
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        const json msg = json::parse(line, nullptr, false);
        if (msg.is_discarded()) return 1;
        const std::string type = msg.value("type", "");
        if (type == "end") return 0;

        if (type == "plan") {
            if (mode == "bad-json") {
                std::cout << "this is not json\n" << std::flush;
                continue;
            }
            if (msg.contains("grid")) {
                // Operator flavor: n constant-zero grid functions.
                const auto n = msg.at("n").get<std::size_t>();
                const auto g = msg.at("grid").get<std::size_t>();
                json funcs = json::array();
                for (std::size_t i = 0; i < n; ++i)
                    funcs.push_back(std::vector<double>(g, 0.0));
                std::cout << json{{"type", "inputs"}, {"grid", g}, {"functions", funcs}}.dump()
                          << "\n"
                          << std::flush;
                continue;
            }
            const auto n = msg.at("n").get<std::size_t>();
            const auto d = msg.at("d").get<std::size_t>();
            auto pts = gapbench::midpoint_grid_points(mode == "bad-count" && n > 1 ? n - 1 : n, d);
            json points = json::array();
            for (const auto& p : pts) points.push_back(p);
            std::cout << json{{"type", "points"}, {"points", points}}.dump() << "\n" << std::flush;
        } else if (type == "values") {
            std::cout << json{{"type", "model_ready"}}.dump() << "\n" << std::flush;
        } else if (type == "query") {
            const std::size_t k = msg.contains("points") ? msg.at("points").size()
                                                         : msg.at("functions").size();
            json values = json::array();
            for (std::size_t i = 0; i < k; ++i) {
                if (mode == "bad-nan")
                    values.push_back(nullptr);  // NaN serializes as null on the wire
                else
                    values.push_back(0.0);
            }
            std::cout << json{{"type", "predictions"}, {"values", values}}.dump() << "\n"
                      << std::flush;
        } else {
            return 1;
        }
    }
    return 0;
}
