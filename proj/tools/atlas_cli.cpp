// atlas build | serve | export

#include <pthread.h>
#include <signal.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "atlas/api.hpp"
#include "atlas/error.hpp"
#include "atlas/http_server.hpp"
#include "atlas/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kInputError = 1, kInternalError = 2 };

int cmd_build(atlas::BuildConfig config, const std::string& mode, const std::string& out) {
  config.thgMode = mode == "data" ? atlas::ThgMode::data : atlas::ThgMode::manual;
  const auto bundle = atlas::build_bundle(config, &std::cout);
  atlas::save_bundle(bundle, out);
  std::cout << "wrote " << out << '\n';
  return kOk;
}

std::shared_ptr<const atlas::Snapshot> load_snapshot(const std::string& path) {
  return std::make_shared<const atlas::Snapshot>(atlas::load_bundle(path));
}

int cmd_serve(const std::string& bundlePath, const std::string& host, int port, const std::string& staticDir) {
  // Block the shutdown and reload signals everywhere; one thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  atlas::ApiService api(load_snapshot(bundlePath));
  atlas::HttpServer server(api);
  if (!staticDir.empty()) server.mount_static(staticDir);
  const int bound = server.bind(host, port);

  std::thread waiter([&] {
    while (true) {
      int sig = 0;
      if (sigwait(&signals, &sig) != 0) continue;
      if (sig == SIGHUP) {
        try {
          api.set_snapshot(load_snapshot(bundlePath));
          std::cerr << "reloaded " << bundlePath << '\n';
        } catch (const std::exception& e) {
          std::cerr << "reload failed, keeping current snapshot: " << e.what() << '\n';
        }
        continue;
      }
      server.stop();
      return;
    }
  });

  std::cout << "listening on http://" << host << ':' << bound << std::endl;
  server.listen();
  // listen() can also return on its own; make sure the waiter wakes up.
  kill(getpid(), SIGTERM);
  waiter.join();
  std::cout << "stopped" << std::endl;
  return kOk;
}

int cmd_export(const std::string& bundlePath, const std::string& kind, const std::string& out) {
  const auto b = atlas::load_bundle(bundlePath);
  if (kind == "graphdb") {
    atlas::export_graphdb_script(b, out);
  } else if (kind == "svg") {
    std::ofstream(out, std::ios::binary)
        << atlas::render_svg(b.layout, b.thg, b.tog, b.elevation, b.contours, b.colorScale);
  } else {
    std::ofstream(out, std::ios::binary) << atlas::serialise_eat(b.eat);
  }
  if (!std::filesystem::exists(out)) throw atlas::Error(atlas::Errc::IoError, "cli", "cannot write " + out);
  std::cout << "wrote " << out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge map builder and server"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style file with [build], [serve] and [export] sections; flags override it");
  app.fallthrough();

  atlas::BuildConfig config;
  config.pyramid.clear();  // empty: the pipeline applies and logs the default
  std::string mode = "manual", buildOut;
  auto* build = app.add_subcommand("build", "Build a bundle from a corpus");
  build->add_option("--corpus", config.corpusPath, "JSON-lines corpus")->required();
  build->add_option("--gazetteer", config.gazetteerPath, "Gazetteer TSV");
  build->add_option("--eat", config.eatPath, "Entity annotation table TSV");
  build->add_option("--vocab", config.vocabularies, "Gazetteer vocabularies to keep");
  build->add_option("--mode", mode, "Topic hierarchy source")->check(CLI::IsMember({"manual", "data"}));
  build->add_option("--threshold", config.threshold, "Shared concepts needed for an edge");
  build->add_option("--pyramid", config.pyramid, "Topics per level, top first (data mode)");
  build->add_option("--padding", config.padding);
  build->add_option("--entity-radius", config.entityRadius);
  build->add_option("--grid-width", config.gridWidth);
  build->add_option("--grid-height", config.gridHeight);
  build->add_option("--bandwidth", config.bandwidth, "Density kernel width in entity radii");
  build->add_option("--alpha", config.alpha, "Weight of topic nesting in the elevation");
  build->add_option("--beta", config.beta, "Weight of instance density in the elevation");
  build->add_option("--iso", config.isoLevels, "Contour levels");
  build->add_option("--seed", config.seed);
  build->add_option("-o,--out", buildOut, "Bundle file to write")->required();

  std::string bundlePath, host = "127.0.0.1", staticDir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve a bundle over HTTP");
  serve->add_option("--bundle", bundlePath)->required()->envname("ATLAS_BUNDLE");
  serve->add_option("--port", port)->envname("ATLAS_PORT")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host)->envname("ATLAS_HOST");
  serve->add_option("--static", staticDir, "Directory of UI files")->envname("ATLAS_STATIC");

  std::string exportBundle, kind, exportOut;
  auto* exporter = app.add_subcommand("export", "Export a bundle");
  exporter->add_option("--bundle", exportBundle)->required();
  exporter->add_option("--kind", kind)->required()->check(CLI::IsMember({"graphdb", "svg", "eat"}));
  exporter->add_option("-o,--out", exportOut)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*build) return cmd_build(config, mode, buildOut);
    if (*serve) return cmd_serve(bundlePath, host, port, staticDir);
    return cmd_export(exportBundle, kind, exportOut);
  } catch (const atlas::Error& e) {
    std::cerr << "error [" << e.module() << "] " << atlas::to_string(e.code()) << ": " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}
