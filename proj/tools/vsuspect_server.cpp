// vsuspect-server: serves the session API over HTTP.

#include <csignal>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "vsuspect/errors.hpp"
#include "vsuspect/http_server.hpp"

namespace {
vsuspect::HttpServer* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual suspect session server"};
  std::string data_dir = "data", host = "127.0.0.1";
  int port = 8080;
  app.add_option("--data", data_dir, "Directory with scenarios/ and profiles/")->check(CLI::ExistingDirectory);
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  CLI11_PARSE(app, argc, argv);

  std::shared_ptr<const vsuspect::Catalog> catalog;
  try {
    catalog = std::make_shared<const vsuspect::Catalog>(vsuspect::Catalog::load_directory(data_dir));
  } catch (const vsuspect::ValidationError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.path << ": " << d.message << "\n";
    return 1;
  }
  vsuspect::HttpServer server(std::make_shared<vsuspect::SessionService>(catalog));
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  server.listen();
  return 0;
}
