//! Porter stemming algorithm (M. F. Porter, 1980).
//!
//! Operates on lowercase ASCII words. Words of length two or less are
//! returned unchanged, as are words containing characters outside `a-z`.

/// Stems a single lowercase word.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut s = Stemmer { b: word.as_bytes().to_vec(), k: word.len() as i32 - 1, j: 0 };
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b.truncate(s.k as usize + 1);
    String::from_utf8(s.b).expect("stemmer operates on ASCII")
}

struct Stemmer {
    b: Vec<u8>,
    /// Index of the last letter of the current word.
    k: i32,
    /// Index of the last letter of the stem candidate set by `ends`.
    j: i32,
}

impl Stemmer {
    fn at(&self, i: i32) -> u8 {
        self.b[i as usize]
    }

    fn is_consonant(&self, i: i32) -> bool {
        match self.at(i) {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.is_consonant(i - 1)
                }
            }
            _ => true,
        }
    }

    /// Number of vowel-consonant sequences in `b[0..=j]`.
    fn measure(&self) -> i32 {
        let mut n = 0;
        let mut i = 0;
        loop {
            if i > self.j {
                return n;
            }
            if !self.is_consonant(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i > self.j {
                    return n;
                }
                if self.is_consonant(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > self.j {
                    return n;
                }
                if !self.is_consonant(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.is_consonant(i))
    }

    fn double_consonant(&self, i: i32) -> bool {
        i >= 1 && self.at(i) == self.at(i - 1) && self.is_consonant(i)
    }

    /// consonant-vowel-consonant ending at `i`, where the final consonant
    /// is not `w`, `x` or `y`.
    fn cvc(&self, i: i32) -> bool {
        if i < 2 || !self.is_consonant(i) || self.is_consonant(i - 1) || !self.is_consonant(i - 2)
        {
            return false;
        }
        !matches!(self.at(i), b'w' | b'x' | b'y')
    }

    /// Tests whether the word ends with `s`; on success sets `j` to the
    /// index just before the suffix.
    fn ends(&mut self, s: &[u8]) -> bool {
        let len = s.len() as i32;
        if len > self.k + 1 {
            return false;
        }
        if &self.b[(self.k - len + 1) as usize..=self.k as usize] != s {
            return false;
        }
        self.j = self.k - len;
        true
    }

    /// Replaces the suffix after `j` with `s`.
    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.j as usize + 1);
        self.b.extend_from_slice(s);
        self.k = self.j + s.len() as i32;
    }

    fn replace_if_measure(&mut self, s: &[u8]) {
        if self.measure() > 0 {
            self.set_to(s);
        }
    }

    /// Plural and past-participle endings: sses/ies/ss/s, eed/ed/ing.
    fn step1ab(&mut self) {
        if self.at(self.k) == b's' {
            if self.ends(b"sses") {
                self.k -= 2;
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.at(self.k - 1) != b's' {
                self.k -= 1;
            }
        }
        if self.ends(b"eed") {
            if self.measure() > 0 {
                self.k -= 1;
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.k = self.j;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_consonant(self.k) {
                self.k -= 1;
                if matches!(self.at(self.k), b'l' | b's' | b'z') {
                    self.k += 1;
                }
            } else {
                self.j = self.k;
                if self.measure() == 1 && self.cvc(self.k) {
                    self.set_to(b"e");
                }
            }
        }
    }

    /// Terminal y becomes i when the stem contains a vowel.
    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            self.b[self.k as usize] = b'i';
        }
    }

    fn apply_rules(&mut self, rules: &[(&[u8], &[u8])]) {
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_measure(replacement);
                return;
            }
        }
    }

    /// Double-suffix reductions, e.g. -ization to -ize.
    fn step2(&mut self) {
        self.apply_rules(&[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"abli", b"able"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
        ]);
    }

    /// -ic-, -full, -ness style reductions.
    fn step3(&mut self) {
        self.apply_rules(&[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ]);
    }

    /// Drops residual suffixes when the remaining stem has measure > 1.
    fn step4(&mut self) {
        let matched = self.ends(b"al")
            || self.ends(b"ance")
            || self.ends(b"ence")
            || self.ends(b"er")
            || self.ends(b"ic")
            || self.ends(b"able")
            || self.ends(b"ible")
            || self.ends(b"ant")
            || self.ends(b"ement")
            || self.ends(b"ment")
            || self.ends(b"ent")
            || (self.ends(b"ion") && self.j >= 0 && matches!(self.at(self.j), b's' | b't'))
            || self.ends(b"ou")
            || self.ends(b"ism")
            || self.ends(b"ate")
            || self.ends(b"iti")
            || self.ends(b"ous")
            || self.ends(b"ive")
            || self.ends(b"ize");
        if matched && self.measure() > 1 {
            self.k = self.j;
        }
    }

    /// Removes a final -e and reduces -ll when the measure allows.
    fn step5(&mut self) {
        self.j = self.k;
        if self.at(self.k) == b'e' {
            let a = self.measure();
            if a > 1 || (a == 1 && !self.cvc(self.k - 1)) {
                self.k -= 1;
            }
        }
        self.j = self.k;
        if self.at(self.k) == b'l' && self.double_consonant(self.k) && self.measure() > 1 {
            self.k -= 1;
        }
    }
}
