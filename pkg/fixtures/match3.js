// Match-3 column crunch: gravity fills a 6x6 board, runs score combos.
var board = [];
var score = 0;
var combo = 0;
var cursor = 0;

function fillBoard() {
  var out = [];
  var i = 0;
  while (i < 36) {
    out.push(1 + Math.floor(Math.random() * 4));
    i = i + 1;
  }
  return out;
}

function cellAt(r, c) {
  return board[r * 6 + c];
}

function findRun() {
  var r = 0;
  while (r < 6) {
    var c = 0;
    while (c < 4) {
      var v = cellAt(r, c);
      if (v > 0 && v === cellAt(r, c + 1) && v === cellAt(r, c + 2)) {
        return {row: r, col: c, value: v};
      }
      c = c + 1;
    }
    r = r + 1;
  }
  return null;
}

function clearRun(run) {
  var k = 0;
  while (k < 3) {
    board[run.row * 6 + run.col + k] = 0;
    k = k + 1;
  }
  combo = combo + 1;
  score = score + run.value * 5 * combo;
}

function dropCells() {
  var c = 0;
  while (c < 6) {
    var r = 5;
    while (r > 0) {
      if (cellAt(r, c) === 0) {
        var above = r - 1;
        board[r * 6 + c] = cellAt(above, c);
        board[above * 6 + c] = 0;
      }
      r = r - 1;
    }
    if (cellAt(0, c) === 0) {
      board[c] = 1 + Math.floor(Math.random() * 4);
    }
    c = c + 1;
  }
}

function swapAhead(x, y) {
  cursor = (cursor + 1) % 35;
  var tmp = board[cursor];
  board[cursor] = board[cursor + 1];
  board[cursor + 1] = tmp;
}

function tickMatch(t) {
  var run = findRun();
  if (run !== null) {
    clearRun(run);
  } else {
    combo = 0;
  }
  dropCells();
  commitState({score: score, combo: combo, top: board[0]});
}

board = fillBoard();
registerTap(swapAhead);
registerTick(tickMatch);
console.log("match grid ready");
