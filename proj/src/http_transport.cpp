#include <httplib.h>

#include "synqa/runner.hpp"

namespace synqa {

namespace {

// "https://host:8443/v1/chat" -> {"https://host:8443", "/v1/chat"}
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("URL is not absolute: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public Transport {
 public:
  HttpResponse post(
      const std::string& url, const std::string& body,
      const std::vector<std::pair<std::string, std::string>>& headers,
      double timeout_s) override {
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - secs) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");

    HttpResponse out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() {
  return std::make_unique<HttplibTransport>();
}

}  // namespace synqa
