// Reference backend for the featurization protocol. Modes:
//   builtin     builtin descriptor of each received cloud (parity with in-process path)
//   centroid    the cloud's centroid; name "identity-test", dim 3
//   bad-dim     drops the last entry of every vector
//   missing-id  renames the second feature of each batch
//   reorder     reverses the feature list
//   nan         poisons the first value of every vector
//   exit-1      handles requests, exits 1 on shutdown
#include <algorithm>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "owc/descriptor.hpp"
#include "owc/geometry.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"owc protocol reference backend"};
  std::string mode = "builtin";
  std::size_t batch_limit = 16;
  app.add_option("--mode", mode, "behavior")
      ->check(CLI::IsMember({"builtin", "centroid", "bad-dim", "missing-id", "reorder", "nan",
                             "exit-1"}));
  app.add_option("--batch-limit", batch_limit)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const owc::DescriptorConfig descriptor;
  const bool centroid = mode == "centroid";
  const std::size_t dim = centroid ? 3 : descriptor.dim();
  const std::string name = centroid ? "identity-test" : "echo-" + mode;

  std::string line;
  while (std::getline(std::cin, line)) {
    json reply;
    try {
      const json msg = json::parse(line);
      const std::string op = msg.value("op", "");
      if (op == "hello") {
        reply = {{"name", name}, {"dim", dim}, {"batch_limit", batch_limit}};
      } else if (op == "shutdown") {
        return mode == "exit-1" ? 1 : 0;
      } else if (op == "featurize") {
        reply["features"] = json::array();
        for (const auto& c : msg.at("clouds")) {
          std::vector<owc::Point3> pts;
          for (const auto& p : c.at("points")) {
            pts.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
          }
          const owc::PointCloud cloud(c.at("id").get<std::string>(), std::move(pts));
          std::vector<double> vec;
          if (centroid) {
            const auto m = owc::centroid(cloud.points());
            vec.assign(m.begin(), m.end());
          } else {
            vec = owc::builtin_descriptor(cloud, descriptor).values;
          }
          if (mode == "bad-dim") vec.pop_back();
          reply["features"].push_back({{"id", cloud.id()}, {"vector", vec}});
        }
        auto& rows = reply["features"];
        if (mode == "missing-id" && rows.size() > 1) rows[1]["id"] = "not-" + rows[1]["id"].get<std::string>();
        if (mode == "reorder") std::reverse(rows.begin(), rows.end());
        if (mode == "nan") {
          // JSON has no NaN literal; an overflowing literal parses to +inf.
          for (auto& r : rows) r["vector"][0] = "@INF@";
          std::string out = reply.dump();
          for (auto pos = out.find("\"@INF@\""); pos != std::string::npos;
               pos = out.find("\"@INF@\"")) {
            out.replace(pos, 7, "1e999");
          }
          std::cout << out << "\n" << std::flush;
          continue;
        }
      } else {
        reply = {{"error", "unknown op '" + op + "'"}};
      }
    } catch (const std::exception& e) {
      reply = {{"error", e.what()}};
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
