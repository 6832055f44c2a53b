// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <utility>

namespace dcm {

Journal::~Journal() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

Journal::Journal(Journal&& other) noexcept : fd_(other.fd_), path_(std::move(other.path_)) {
    other.fd_ = -1;
}

Journal& Journal::operator=(Journal&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = other.fd_;
        path_ = std::move(other.path_);
        other.fd_ = -1;
    }
    return *this;
}

Result<Journal> Journal::open(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0600);
    if (fd < 0) {
        return Result<Journal>::failure(Err::IoError, "cannot open journal " + path.string());
    }
    Journal j;
    j.fd_ = fd;
    j.path_ = path;
    return Result<Journal>::success(std::move(j));
}

Result<void> Journal::append(ByteSpan record) {
    if (fd_ < 0) {
        return Result<void>::failure(Err::IoError, "journal not open");
    }
    std::string line = to_hex(record);
    line.push_back('\n');
    if (::write(fd_, line.data(), line.size()) != static_cast<ssize_t>(line.size())) {
        return Result<void>::failure(Err::IoError, "journal write failed");
    }
    if (::fsync(fd_) != 0) {
        return Result<void>::failure(Err::IoError, "journal fsync failed");
    }
    return Result<void>::success();
}

Result<std::vector<Bytes>> Journal::read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return Result<std::vector<Bytes>>::failure(Err::IoError,
                                                   "cannot read journal " + path.string());
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<Bytes> records;
    size_t pos = 0;
    while (pos < content.size()) {
        size_t newline = content.find('\n', pos);
        if (newline == std::string::npos) {
            // A trailing fragment without its newline is a torn append from a
            // crash before fsync; the record was never acknowledged.
            break;
        }
        std::string_view line(content.data() + pos, newline - pos);
        pos = newline + 1;
        if (line.empty()) {
            continue;
        }
        auto record = bytes_from_hex(line);
        if (!record) {
            return Result<std::vector<Bytes>>::failure(Err::MalformedInput,
                                                       "corrupt journal line in " + path.string());
        }
        records.push_back(std::move(*record));
    }
    return Result<std::vector<Bytes>>::success(std::move(records));
}

}  // namespace dcm
