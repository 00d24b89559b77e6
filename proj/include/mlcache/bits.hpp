#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

/// Packed bit string. Bit i lives in word i / 64 at position i % 64; unused
/// high bits of the last word are always zero so equality is word-wise.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t size) : words_((size + 63) / 64, 0), size_(size) {}

    static BitString random(std::size_t size, std::mt19937_64& rng) {
        BitString out(size);
        for (auto& w : out.words_)
            w = rng();
        out.trim();
        return out;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

    void set(std::size_t i, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (value)
            words_[i / 64] |= mask;
        else
            words_[i / 64] &= ~mask;
    }

    void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

    BitString slice(std::size_t offset, std::size_t length) const {
        if (offset + length > size_)
            throw std::out_of_range("slice [" + std::to_string(offset) + ", +" + std::to_string(length) +
                                    ") beyond " + std::to_string(size_) + " bits");
        BitString out(length);
        for (std::size_t i = 0; i < length; ++i)
            if (get(offset + i))
                out.set(i, true);
        return out;
    }

    BitString& append(const BitString& tail) {
        const std::size_t base = size_;
        size_ += tail.size_;
        words_.resize((size_ + 63) / 64, 0);
        if (base % 64 == 0) {
            std::copy(tail.words_.begin(), tail.words_.end(), words_.begin() + static_cast<std::ptrdiff_t>(base / 64));
            return *this;
        }
        for (std::size_t i = 0; i < tail.size_; ++i)
            if (tail.get(i))
                set(base + i, true);
        return *this;
    }

    BitString& operator^=(const BitString& other) {
        if (other.size_ != size_)
            throw std::invalid_argument("xor of " + std::to_string(size_) + " and " + std::to_string(other.size_) +
                                        " bits");
        for (std::size_t w = 0; w < words_.size(); ++w)
            words_[w] ^= other.words_[w];
        return *this;
    }

    friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
    friend bool operator==(const BitString&, const BitString&) = default;

    /// MSB-first bytes; the final byte is padded with zero bits.
    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
        for (std::size_t i = 0; i < size_; ++i)
            if (get(i))
                out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
        return out;
    }

    static BitString from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t size) {
        if (bytes.size() * 8 < size)
            throw std::invalid_argument("not enough bytes for " + std::to_string(size) + " bits");
        BitString out(size);
        for (std::size_t i = 0; i < size; ++i)
            if (bytes[i / 8] & (0x80u >> (i % 8)))
                out.set(i, true);
        return out;
    }

private:
    void trim() {
        if (size_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

}  // namespace mlcache
