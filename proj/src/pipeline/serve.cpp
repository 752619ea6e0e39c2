// Copyright 2026 The Rerend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipeline/serve.hpp"

#include <httplib.h>

#include "common/error.hpp"

namespace rerend {

StaticServer::StaticServer() : server_(std::make_unique<httplib::Server>()) {}

StaticServer::~StaticServer() { stop(); }

int StaticServer::start(const std::filesystem::path& root, const std::string& host, int port) {
  if (!std::filesystem::is_directory(root)) {
    fail(ErrorKind::kMissingFile, "serve: directory " + root.string() + " does not exist");
  }
  require(port >= 0 && port <= 65535, "serve: port must be in [0, 65535]");
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, HEAD, OPTIONS"},
                                {"Access-Control-Allow-Headers", "*"}});
  server_->set_file_extension_and_mimetype_mapping("obj", "text/plain");
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  if (!server_->set_mount_point("/", root.string())) {
    fail(ErrorKind::kIo, "serve: cannot mount " + root.string());
  }
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) fail(ErrorKind::kIo, "serve: cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void StaticServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void StaticServer::stop() {
  if (server_) server_->stop();
  wait();
}

}  // namespace rerend
