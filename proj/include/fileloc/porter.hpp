#pragma once

// Original (1980) Porter stemming algorithm for English, including the two
// departures from the published paper that the reference implementation
// carries (bli->ble, logi->log).  Input is expected to be lowercase; words
// of length <= 2 are returned unchanged.

#include <string>
#include <string_view>

namespace fileloc {

class PorterStemmer {
public:
    std::string stem(std::string word) {
        b_ = std::move(word);
        k_ = static_cast<int>(b_.size()) - 1;
        j_ = 0;
        if (k_ <= 1) return b_;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        b_.resize(static_cast<std::size_t>(k_ + 1));
        return std::move(b_);
    }

private:
    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int j) const {
        if (j < 1) return false;
        if (b_[static_cast<std::size_t>(j)] != b_[static_cast<std::size_t>(j - 1)]) return false;
        return cons(j);
    }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (s.back() != b_[static_cast<std::size_t>(k_)]) return false;
        if (len > k_ + 1) return false;
        if (b_.compare(static_cast<std::size_t>(k_ - len + 1), static_cast<std::size_t>(len),
                       s) != 0)
            return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.resize(static_cast<std::size_t>(j_ + 1));
        b_.append(s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_m(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses"))
                k_ -= 2;
            else if (ends("ies"))
                set_to("i");
            else if (b_[static_cast<std::size_t>(k_ - 1)] != 's')
                --k_;
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at"))
                set_to("ate");
            else if (ends("bl"))
                set_to("ble");
            else if (ends("iz"))
                set_to("ize");
            else if (doublec(k_)) {
                --k_;
                char ch = b_[static_cast<std::size_t>(k_)];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        if (k_ < 1) return;  // stems like "ies" -> "i" shrink below suffix reach
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("ational")) replace_if_m("ate");
                else if (ends("tional")) replace_if_m("tion");
                break;
            case 'c':
                if (ends("enci")) replace_if_m("ence");
                else if (ends("anci")) replace_if_m("ance");
                break;
            case 'e':
                if (ends("izer")) replace_if_m("ize");
                break;
            case 'l':
                if (ends("bli")) replace_if_m("ble");
                else if (ends("alli")) replace_if_m("al");
                else if (ends("entli")) replace_if_m("ent");
                else if (ends("eli")) replace_if_m("e");
                else if (ends("ousli")) replace_if_m("ous");
                break;
            case 'o':
                if (ends("ization")) replace_if_m("ize");
                else if (ends("ation")) replace_if_m("ate");
                else if (ends("ator")) replace_if_m("ate");
                break;
            case 's':
                if (ends("alism")) replace_if_m("al");
                else if (ends("iveness")) replace_if_m("ive");
                else if (ends("fulness")) replace_if_m("ful");
                else if (ends("ousness")) replace_if_m("ous");
                break;
            case 't':
                if (ends("aliti")) replace_if_m("al");
                else if (ends("iviti")) replace_if_m("ive");
                else if (ends("biliti")) replace_if_m("ble");
                break;
            case 'g':
                if (ends("logi")) replace_if_m("log");
                break;
            default: break;
        }
    }

    void step3() {
        switch (b_[static_cast<std::size_t>(k_)]) {
            case 'e':
                if (ends("icate")) replace_if_m("ic");
                else if (ends("ative")) replace_if_m("");
                else if (ends("alize")) replace_if_m("al");
                break;
            case 'i':
                if (ends("iciti")) replace_if_m("ic");
                break;
            case 'l':
                if (ends("ical")) replace_if_m("ic");
                else if (ends("ful")) replace_if_m("");
                break;
            case 's':
                if (ends("ness")) replace_if_m("");
                break;
            default: break;
        }
    }

    void step4() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (!ends("al")) return;
                break;
            case 'c':
                if (!ends("ance") && !ends("ence")) return;
                break;
            case 'e':
                if (!ends("er")) return;
                break;
            case 'i':
                if (!ends("ic")) return;
                break;
            case 'l':
                if (!ends("able") && !ends("ible")) return;
                break;
            case 'n':
                if (!ends("ant") && !ends("ement") && !ends("ment") && !ends("ent")) return;
                break;
            case 'o':
                if (ends("ion") && j_ >= 0 &&
                    (b_[static_cast<std::size_t>(j_)] == 's' ||
                     b_[static_cast<std::size_t>(j_)] == 't')) {
                } else if (ends("ou")) {
                } else {
                    return;
                }
                break;
            case 's':
                if (!ends("ism")) return;
                break;
            case 't':
                if (!ends("ate") && !ends("iti")) return;
                break;
            case 'u':
                if (!ends("ous")) return;
                break;
            case 'v':
                if (!ends("ive")) return;
                break;
            case 'z':
                if (!ends("ize")) return;
                break;
            default: return;
        }
        if (m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[static_cast<std::size_t>(k_)] == 'l' && doublec(k_) && m() > 1) --k_;
    }

    std::string b_;
    int k_ = 0;
    int j_ = 0;
};

inline std::string porter_stem(std::string word) {
    PorterStemmer stemmer;
    return stemmer.stem(std::move(word));
}

}  // namespace fileloc
