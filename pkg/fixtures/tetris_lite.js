// Falling columns: pieces drop in a 8x12 well, full rows clear for score.
var well = [];
var pieceCol = 3;
var pieceRow = 0;
var pieceShape = 1;
var score = 0;
var cleared = 0;
var level = 1;

function emptyWell() {
  var out = [];
  var i = 0;
  while (i < 96) {
    out.push(0);
    i = i + 1;
  }
  return out;
}

function wellAt(r, c) {
  return well[r * 8 + c];
}

function pieceBlocked() {
  if (pieceRow >= 11) { return true; }
  if (wellAt(pieceRow + 1, pieceCol) > 0) { return true; }
  return false;
}

function lockPiece() {
  well[pieceRow * 8 + pieceCol] = pieceShape;
  pieceRow = 0;
  pieceCol = (pieceCol + 3) % 8;
  pieceShape = 1 + (pieceShape % 3);
}

function clearRows() {
  var r = 11;
  var gained = 0;
  while (r >= 0) {
    var full = true;
    var c = 0;
    while (c < 8) {
      if (wellAt(r, c) === 0) { full = false; break; }
      c = c + 1;
    }
    if (full) {
      var k = r * 8;
      var j = 0;
      while (j < 8) { well[k + j] = 0; j = j + 1; }
      var above = k - 1;
      while (above >= 0) {
        well[above + 8] = well[above];
        well[above] = 0;
        above = above - 1;
      }
      gained = gained + 1;
      cleared = cleared + 1;
    } else {
      r = r - 1;
    }
  }
  return gained;
}

function nudgePiece(x, y) {
  if (x < 64) {
    pieceCol = pieceCol - 1;
  } else {
    pieceCol = pieceCol + 1;
  }
  if (pieceCol < 0) { pieceCol = 0; }
  if (pieceCol > 7) { pieceCol = 7; }
}

function tickWell(t) {
  if (pieceBlocked()) {
    lockPiece();
    var rows = clearRows();
    if (rows > 0) {
      score = score + rows * rows * 10 * level;
      if (cleared > level * 4) { level = level + 1; }
    }
    if (wellAt(0, pieceCol) > 0) {
      console.log("toppled out at", t);
      well = emptyWell();
      score = Math.floor(score / 2);
      level = 1;
    }
  } else {
    pieceRow = pieceRow + 1;
  }
  commitState({score: score, cleared: cleared, level: level});
}

well = emptyWell();
registerTap(nudgePiece);
registerTick(tickWell);
console.log("well prepared");
