#include <doctest.h>

#include <fstream>
#include <thread>

#include <httplib.h>

#include "fixtures.hpp"
#include "newsframe/fetch.hpp"

using namespace newsframe;

namespace {

const std::string kPng = std::string("\x89PNG\r\n\x1a\n", 8) + "rest-of-file";
const std::string kJpeg = std::string("\xFF\xD8\xFF\xE0", 4) + "jpeg-body";

class Server {
public:
    Server() {
        svr_.Get("/a.png", [](const httplib::Request&, httplib::Response& r) { r.set_content(kPng, "image/png"); });
        svr_.Get("/b.jpg", [](const httplib::Request&, httplib::Response& r) { r.set_content(kJpeg, "image/jpeg"); });
        svr_.Get("/moved", [](const httplib::Request&, httplib::Response& r) { r.set_redirect("/a.png"); });
        svr_.Get("/page", [](const httplib::Request&, httplib::Response& r) {
            r.set_content("<html>not an image</html>", "text/html");
        });
        svr_.Get("/empty", [](const httplib::Request&, httplib::Response& r) { r.set_content("", "image/png"); });
        port_ = svr_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { svr_.listen_after_bind(); });
        svr_.wait_until_ready();
    }
    ~Server() {
        svr_.stop();
        thread_.join();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

private:
    httplib::Server svr_;
    int port_ = 0;
    std::thread thread_;
};

ImageRecord record(const std::string& id, const std::string& uri) {
    auto im = fixtures::image(id, 1, 17, true);
    im.image_uri = uri;
    return im;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("fetching images into the cache") {
    Server server;
    fixtures::TempDir cache("fetch");
    FetchOptions opts;
    opts.cache_dir = cache.path();
    opts.timeout_seconds = 5;
    opts.retries = 0;

    std::vector<ImageRecord> records{record("a", server.url("/a.png")), record("b", server.url("/b.jpg")),
                                     record("c", server.url("/missing.png"))};
    auto report = fetch_images(records, opts);
    CHECK(report.fetched == 2);
    CHECK(report.failed == 1);
    CHECK(report.cached == 0);
    CHECK(report.failures.count("c") == 1);
    REQUIRE(records[0].local_path);
    CHECK(slurp(*records[0].local_path) == kPng);
    CHECK_FALSE(records[2].local_path);

    SUBCASE("second pass is served from the cache") {
        std::vector<ImageRecord> again{record("a", "http://127.0.0.1:1/never"), record("b", server.url("/b.jpg"))};
        const auto r2 = fetch_images(again, opts);
        CHECK(r2.cached == 2);
        CHECK(r2.fetched == 0);
        CHECK(r2.failed == 0);
    }
}

TEST_CASE("fetch failures are collected, never thrown") {
    Server server;
    fixtures::TempDir cache("fetchfail");
    FetchOptions opts;
    opts.cache_dir = cache.path();
    opts.timeout_seconds = 3;
    opts.retries = 1;
    std::vector<ImageRecord> records{record("down", "http://127.0.0.1:1/x.png"), record("html", server.url("/page")),
                                     record("empty", server.url("/empty")), record("redir", server.url("/moved"))};
    const auto report = fetch_images(records, opts);
    CHECK(report.failed == 3);
    CHECK(report.fetched == 1);
    CHECK(records[3].local_path.has_value());
    for (const auto& id : {"down", "html", "empty"}) CHECK(report.failures.count(id) == 1);
    for (const auto& e : std::filesystem::directory_iterator(cache.path())) {
        CHECK(e.path().extension() != ".part");
    }
}

TEST_CASE("image signatures") {
    CHECK(looks_like_image(kPng));
    CHECK(looks_like_image(kJpeg));
    CHECK(looks_like_image("GIF89a......"));
    CHECK_FALSE(looks_like_image("<html>"));
    CHECK_FALSE(looks_like_image(""));
}
